"""Define package tests."""
