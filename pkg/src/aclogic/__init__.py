"""Access-control logic toolkit.

Translates access-control policies (says / speaks-for / Boolean
principals) into monomodal S4 and into simply typed lambda calculus,
decides validity with a tableau prover and bounded Kripke countermodel
search, machine-checks the semantic correspondences between the two
readings on finite models, and emits TPTP THF problem files.
"""

__version__ = "0.1.0"
