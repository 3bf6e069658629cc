"""Tests for the quantum-walk graph kernel toolkit."""
