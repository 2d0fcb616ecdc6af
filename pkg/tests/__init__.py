"""Tests for micdam."""
