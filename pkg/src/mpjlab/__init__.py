"""Multiparty pointer jumping in the number-on-the-forehead model."""
