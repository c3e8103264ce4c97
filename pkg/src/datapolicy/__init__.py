"""Cookie terms-of-use as data: parse, match, agree, prove.

The package implements a local consent pipeline: machine-readable cookie
policies (ODRL requests or DToU app policies) are parsed off the wire,
matched against a user's preference profile over the DPV purpose
taxonomy, and either answered automatically with a synthesized ODRL
agreement or queued for a human decision. Agreements travel in dedicated
HTTP headers and every exchange lands in a hash-chained consent log.
"""

__version__ = "0.1.0"
