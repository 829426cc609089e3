"""betheforge: nested algebraic Bethe ansatz workbench for RTT algebras of
gl(2), gl(3) and sp(4) type, with every construction verified against
independent brute-force linear algebra."""

__version__ = "0.1.0"
