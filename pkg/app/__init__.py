"""
Cone Spectra - Ana uygulama paketi
"""
