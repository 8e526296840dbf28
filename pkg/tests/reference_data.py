"""Reference ray tables and hand-derived entropy patterns used as oracles.

Rows list H(A_x) for each x, then H(B_y), then H(A_xB_y) with x the slow
index, matching the coordinate order of the bipartite observable spaces
(the leading H() = 0 coordinate is omitted).
"""

# Bipartite, two settings.  The reference listing of row 2 has H(A1B1) = 1 next to
# H(A1) = H(B1) = 0, which breaks subadditivity; the consistent ray (A0, B0 perfectly
# correlated, all else null) has 0 there.
TABLE_2x2 = [
    (1, 0, 0, 0, 1, 1, 0, 0),
    (1, 0, 1, 0, 1, 1, 1, 0),
    (1, 1, 1, 0, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 2),
]
TABLE_2x2_LOCAL = [True, True, True, True, False]

# Bipartite, three settings.  The reference listing of row 5 has H(A2B1) = 0 next to
# H(A2) = 1, which breaks monotonicity; the only enumerated class not matching
# a listed row differs from it in exactly that entry, which is 1.
TABLE_3x3 = [
    (1, 0, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 1, 0, 0, 1, 1, 1, 1, 0, 0, 1, 0, 0),
    (1, 1, 0, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 0, 0),
    (1, 1, 0, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0),
    (1, 1, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1),
    (1, 1, 0, 1, 1, 0, 1, 1, 1, 1, 2, 1, 1, 1, 0),
    (1, 1, 1, 1, 1, 1, 2, 2, 1, 2, 2, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 2, 1, 2, 2, 2, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 2, 1, 2, 1, 2, 1, 2, 1, 1),
    (1, 1, 1, 1, 1, 0, 2, 1, 1, 2, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 0, 1, 2, 1, 2, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 2, 2, 1, 2, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 1, 2, 1, 2, 1, 2, 1, 1),
    (1, 1, 1, 1, 1, 0, 2, 1, 1, 1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 2, 2, 1, 1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 2, 1, 2, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 1, 1),
]
TABLE_3x3_LOCAL = [True] * 7 + [False] * 13

# Information-causality cone, columns in listing order: X0, X1, G0, G1, X0G0, X1G1, M.
IC_COLUMNS = ("X0", "X1", "G0", "G1", "X0G0", "X1G1", "M")
TABLE_IC = [
    (0, 0, 0, 0, 0, 0, 1),
    (0, 0, 0, 1, 0, 1, 0),
    (0, 0, 1, 0, 1, 0, 0),
    (0, 1, 0, 0, 0, 1, 0),
    (1, 0, 0, 0, 1, 0, 0),
    (0, 1, 0, 1, 0, 1, 1),
    (1, 0, 1, 0, 1, 0, 1),
    (1, 1, 1, 1, 1, 1, 1),
]
TABLE_IC_VIOLATES = [False] * 7 + [True]

# Optimum of S_L|NS over the six GHZ phases for d = 2: best point of a 0.01
# grid over the four phase combinations the d = 2 objective depends on,
# polished with Nelder-Mead on the closed form sum of binary entropies of
# cos^2(pi t / 2).
GHZ_D2_OPTIMUM = -0.09043043485688679
