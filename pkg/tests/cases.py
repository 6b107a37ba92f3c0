"""Hand-checked classification cases shared by unit and acceptance tests."""

from modlog.termmod import TermModification as T

TERM_CASES = [
    ("Beckham", "Beckham Milan", T.SPECIFICATION),
    ("Beckham Milan", "Beckham", T.GENERALIZATION),
    ("Beckham Milan", "Beckham Madrid", T.REFORMULATION),
    ("car", "cars", T.LEXICAL_VARIATION),
    ("Monet", "impressionism", T.NO_RELATION),
    ("painting", "paintings", T.LEXICAL_VARIATION),
    ("impressionist paintings", "impressionist painting", T.LEXICAL_VARIATION),
    ("monet", "monet water lilies", T.SPECIFICATION),
    ("monet water lilies", "water lilies", T.GENERALIZATION),
    ("dog", "labrador", T.NO_RELATION),
    ("prince", "princess", T.NO_RELATION),
    ("queen beatrix 2010", "queen beatrix", T.GENERALIZATION),
    ("queen beatrix", "queen beatrix 2010", T.SPECIFICATION),
    ("amsterdam canal", "amsterdam canals bridge", T.SPECIFICATION),
    ("amsterdam canal bridge", "rotterdam canal", T.REFORMULATION),
    ("joe cole", "frank lampard", T.NO_RELATION),
    ("flood 1953", "flood 1954", T.REFORMULATION),
    ("connected connection", "connect", T.LEXICAL_VARIATION),
    ("running shoes", "run shoe", T.LEXICAL_VARIATION),
    ("generalization", "general", T.LEXICAL_VARIATION),
]
