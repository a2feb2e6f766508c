"""crtrig - binary32入力に対する正しく丸められた sin, cos, tan"""

__version__ = "0.1.0"
