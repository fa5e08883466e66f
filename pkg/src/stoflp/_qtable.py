"""Upper quantiles of the studentized range, q(p, f) for p = 2..10.

Rows are keyed by residual degrees of freedom; ``None`` is the f = infinity
row. Values generated once with ``scipy.stats.studentized_range`` and rounded
to four decimals."""

GROUPS = tuple(range(2, 11))
DF = (1, 2, 3, 4, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80, 85, 90, 95, 100, 105, 110, 115, 120)

TABLE = {
    0.05: {
        1: (17.9693, 26.9755, 32.8187, 37.0815, 40.4076, 43.1186, 45.3973, 47.3566, 49.071),
        2: (6.0849, 8.3308, 9.798, 10.8811, 11.7343, 12.4349, 13.0273, 13.539, 13.9885),
        3: (4.5007, 5.9096, 6.8245, 7.5017, 8.0371, 8.4783, 8.8525, 9.1766, 9.462),
        4: (3.9265, 5.0402, 5.7571, 6.287, 6.7064, 7.0526, 7.3465, 7.6015, 7.8263),
        5: (3.6354, 4.6017, 5.2183, 5.6731, 6.0329, 6.3299, 6.5823, 6.8014, 6.9947),
        10: (3.1511, 3.8768, 4.3266, 4.6543, 4.912, 5.1242, 5.3042, 5.4605, 5.5984),
        15: (3.0143, 3.6734, 4.076, 4.367, 4.5947, 4.7816, 4.9399, 5.077, 5.1979),
        20: (2.95, 3.5779, 3.9583, 4.2319, 4.4452, 4.6199, 4.7676, 4.8954, 5.0079),
        25: (2.9126, 3.5226, 3.89, 4.1534, 4.3583, 4.5258, 4.6672, 4.7894, 4.8969),
        30: (2.8882, 3.4864, 3.8454, 4.1021, 4.3015, 4.4642, 4.6014, 4.7199, 4.8241),
        35: (2.871, 3.461, 3.814, 4.0659, 4.2614, 4.4207, 4.555, 4.6709, 4.7727),
        40: (2.8582, 3.4421, 3.7907, 4.0391, 4.2316, 4.3885, 4.5205, 4.6345, 4.7345),
        45: (2.8484, 3.4275, 3.7727, 4.0184, 4.2087, 4.3635, 4.4939, 4.6063, 4.705),
        50: (2.8405, 3.4159, 3.7584, 4.002, 4.1904, 4.3437, 4.4727, 4.5839, 4.6814),
        55: (2.8341, 3.4065, 3.7468, 3.9885, 4.1755, 4.3276, 4.4554, 4.5656, 4.6623),
        60: (2.8288, 3.3987, 3.7371, 3.9774, 4.1632, 4.3141, 4.4411, 4.5504, 4.6463),
        65: (2.8244, 3.3921, 3.7289, 3.968, 4.1527, 4.3028, 4.429, 4.5376, 4.6329),
        70: (2.8206, 3.3864, 3.722, 3.96, 4.1438, 4.2932, 4.4186, 4.5267, 4.6214),
        75: (2.8173, 3.3815, 3.716, 3.9531, 4.1361, 4.2848, 4.4097, 4.5172, 4.6114),
        80: (2.8144, 3.3773, 3.7107, 3.947, 4.1294, 4.2775, 4.4019, 4.5089, 4.6028),
        85: (2.8118, 3.3735, 3.7061, 3.9417, 4.1235, 4.2711, 4.395, 4.5016, 4.5951),
        90: (2.8096, 3.3702, 3.702, 3.937, 4.1182, 4.2654, 4.3889, 4.4952, 4.5883),
        95: (2.8076, 3.3672, 3.6983, 3.9327, 4.1135, 4.2603, 4.3834, 4.4894, 4.5822),
        100: (2.8058, 3.3646, 3.695, 3.9289, 4.1093, 4.2557, 4.3785, 4.4842, 4.5768),
        105: (2.8041, 3.3622, 3.692, 3.9255, 4.1055, 4.2515, 4.3741, 4.4795, 4.5719),
        110: (2.8026, 3.36, 3.6893, 3.9224, 4.102, 4.2478, 4.3701, 4.4752, 4.5674),
        115: (2.8013, 3.358, 3.6868, 3.9195, 4.0989, 4.2443, 4.3664, 4.4713, 4.5633),
        120: (2.8, 3.3561, 3.6846, 3.9169, 4.096, 4.2412, 4.363, 4.4678, 4.5595),
        None: (2.7718, 3.3145, 3.6332, 3.8577, 4.0301, 4.1696, 4.2863, 4.3865, 4.4741),
    },
    0.01: {
        1: (90.0242, 135.0407, 164.2577, 185.5753, 202.2097, 215.7691, 227.1663, 236.9662, 245.5416),
        2: (14.0358, 19.0189, 22.2937, 24.7172, 26.629, 28.2006, 29.5301, 30.6794, 31.6894),
        3: (8.2603, 10.6185, 12.1695, 13.3243, 14.2407, 14.9978, 15.641, 16.199, 16.6908),
        4: (6.5112, 8.1198, 9.1729, 9.9583, 10.5832, 11.1009, 11.5418, 11.9251, 12.2637),
        5: (5.7023, 6.9757, 7.8042, 8.4215, 8.9131, 9.3209, 9.6687, 9.9715, 10.2393),
        10: (4.482, 5.2702, 5.7686, 6.1361, 6.4275, 6.669, 6.8749, 7.0544, 7.2133),
        15: (4.1673, 4.8359, 5.2518, 5.5558, 5.7956, 5.9936, 6.1621, 6.3087, 6.4384),
        20: (4.0239, 4.6392, 5.018, 5.2933, 5.5095, 5.6876, 5.8389, 5.9703, 6.0865),
        25: (3.942, 4.5272, 4.885, 5.1439, 5.3468, 5.5135, 5.6549, 5.7775, 5.8858),
        30: (3.8891, 4.4549, 4.7992, 5.0476, 5.2418, 5.4012, 5.5361, 5.6531, 5.7563),
        35: (3.852, 4.4044, 4.7393, 4.9804, 5.1685, 5.3227, 5.4532, 5.5662, 5.6657),
        40: (3.8247, 4.3672, 4.6951, 4.9308, 5.1145, 5.2648, 5.392, 5.502, 5.5989),
        45: (3.8036, 4.3385, 4.6612, 4.8927, 5.073, 5.2204, 5.345, 5.4527, 5.5476),
        50: (3.787, 4.3159, 4.6343, 4.8625, 5.0401, 5.1852, 5.3078, 5.4137, 5.5069),
        55: (3.7734, 4.2974, 4.6125, 4.838, 5.0134, 5.1566, 5.2775, 5.382, 5.4739),
        60: (3.7622, 4.2822, 4.5944, 4.8178, 4.9913, 5.133, 5.2525, 5.3558, 5.4466),
        65: (3.7528, 4.2694, 4.5792, 4.8007, 4.9727, 5.1131, 5.2315, 5.3337, 5.4236),
        70: (3.7447, 4.2584, 4.5663, 4.7862, 4.9569, 5.0961, 5.2135, 5.3149, 5.404),
        75: (3.7377, 4.249, 4.5551, 4.7736, 4.9432, 5.0815, 5.198, 5.2986, 5.3871),
        80: (3.7317, 4.2407, 4.5453, 4.7627, 4.9313, 5.0687, 5.1845, 5.2845, 5.3723),
        85: (3.7263, 4.2335, 4.5368, 4.7531, 4.9208, 5.0575, 5.1726, 5.272, 5.3593),
        90: (3.7216, 4.2271, 4.5291, 4.7445, 4.9115, 5.0475, 5.1621, 5.261, 5.3478),
        95: (3.7174, 4.2213, 4.5224, 4.7369, 4.9032, 5.0386, 5.1527, 5.2511, 5.3375),
        100: (3.7136, 4.2162, 4.5163, 4.7301, 4.8957, 5.0306, 5.1442, 5.2422, 5.3283),
        105: (3.7101, 4.2115, 4.5108, 4.7239, 4.889, 5.0234, 5.1366, 5.2342, 5.32),
        110: (3.707, 4.2073, 4.5058, 4.7183, 4.8829, 5.0169, 5.1297, 5.227, 5.3124),
        115: (3.7042, 4.2035, 4.5012, 4.7132, 4.8773, 5.0109, 5.1234, 5.2204, 5.3055),
        120: (3.7016, 4.1999, 4.497, 4.7085, 4.8722, 5.0055, 5.1176, 5.2143, 5.2992),
        None: (3.6428, 4.1203, 4.4028, 4.6028, 4.757, 4.8822, 4.9872, 5.0775, 5.1566),
    },
}
