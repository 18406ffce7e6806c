"""Pinned approximate-model coefficients.

Generated by tools/calibrate_absorption_approx.py from the bundled
line list; do not edit by hand.
"""

COEFFS = {
    "100-450": {
        "water_terms": [
            (6.114566764718277, 0.05555911468157917, 0.09207880074717631, 0.4673527846055818),
            (10.844233289551267, 0.01909399061562752, 0.10126368056184232, 0.5073121631455366),
            (12.68202017276899, 0.04227960537773342, 0.10417102082367738, 0.5273217567907181),
            (14.648493925754464, 0.02103210316514969, 0.09738419947592815, 0.447630135868477),
            (14.944508157039762, 0.06639826483530507, 0.10891521803270074, 0.5172222866197885),
        ],
        "fixed_terms": [
            (3.9610836374009115, 4.0824588350929557e-07, 0.0048471067281332545),
            (12.291783537796672, 6.939196954812096e-08, 0.0033281743201195087),
            (14.168568576865265, 2.1311095628043364e-07, 0.0032143964440959076),
        ],
        "cubic": (2.344795159513409e-37, -1.532265316996453e-25, 3.2855515425852175e-14, -0.0021756569066321463),
    },
    "275-400": {
        "water_terms": [
            (10.844233289551267, 0.01909399061562752, 0.10126368056184232, 0.5073121631455366),
            (12.68202017276899, 0.04227960537773342, 0.10417102082367738, 0.5273217567907181),
        ],
        "fixed_terms": [
            (12.291783537796672, 6.939196954812096e-08, 0.0033281743201195087),
        ],
        "cubic": (6.130165021809435e-37, -5.453349878995257e-25, 1.6559816750975478e-13, -0.016826168340230624),
    },
}
