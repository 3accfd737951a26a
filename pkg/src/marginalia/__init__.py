"""Paragraph-wise summarization engine with margin-annotation cards."""

__version__ = "0.1.0"
