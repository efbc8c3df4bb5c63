"""Compact partial order index (CPOI) for archiving versioned triple sets."""
