"""Unit tests package."""