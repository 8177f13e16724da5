"""Published rows (qubits, N, p, q, t) of the largest interesting semiprimes."""

TABLE = [
    (5, 15, 3, 5, 8),
    (6, 21, 3, 7, 9),
    (7, 35, 5, 7, 11),
    (8, 35, 5, 7, 11),
    (9, 253, 11, 23, 16),
    (10, 493, 17, 29, 18),
    (11, 1007, 19, 53, 20),
    (12, 2047, 23, 89, 22),
    (13, 4087, 61, 67, 24),
    (14, 8051, 83, 97, 26),
    (15, 16241, 109, 149, 28),
    (16, 32743, 137, 239, 30),
    (17, 65509, 109, 601, 32),
    (18, 131029, 283, 463, 34),
    (19, 262099, 349, 751, 36),
    (20, 524137, 557, 941, 38),
    (21, 1048351, 1009, 1039, 40),
    (22, 2097101, 1399, 1499, 42),
    (23, 4194163, 1307, 3209, 44),
    (24, 8388563, 2357, 3559, 46),
    (25, 16777207, 4093, 4099, 48),
    (26, 33554089, 3797, 8837, 50),
    (27, 67108147, 8011, 8377, 52),
    (28, 134217449, 11119, 12071, 54),
    (29, 268435247, 12589, 21323, 56),
    (30, 536870861, 22717, 23633, 58),
    (31, 1073741687, 27779, 38653, 60),
    (32, 2147483551, 32063, 66977, 62),
    (33, 4294967213, 57139, 75167, 64),
    (34, 8589933181, 89597, 95873, 66),
    (35, 17179869131, 125627, 136753, 68),
    (36, 34359737977, 117517, 292381, 70),
    (37, 68719476733, 242819, 283007, 72),
    (38, 137438953319, 189853, 723923, 74),
    (39, 274877906893, 364303, 754531, 76),
    (40, 549755813701, 712321, 771781, 78),
    (41, 1099511623591, 1002817, 1096423, 80),
    (42, 2199023255179, 1286533, 1709263, 82),
    (43, 4398046510399, 2014013, 2183723, 84),
    (44, 8796093021439, 2217443, 3966773, 86),
    (45, 17592186044353, 2005519, 8771887, 88),
    (46, 35184372088787, 3769453, 9334079, 90),
    (47, 70368744177439, 8388593, 8388623, 92),
    (48, 140737488355141, 11150957, 12621113, 94),
    (49, 281474976708763, 15847327, 17761669, 96),
    (50, 562949953421083, 16619039, 33873797, 98),
]
