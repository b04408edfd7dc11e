"""Test suite for OCR Weighbridge Parser."""
