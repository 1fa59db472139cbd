//! Reference values for the n = 8 tables of optimal sequences, used by the
//! acceptance suite.

/// Best block success probabilities (%) for n = 8; rows k_tot = 2..=11, columns m = 2..=7.
pub const TABLE_PR: [[f64; 6]; 10] = [
    [10.5747, 13.4310, 16.9145, 22.7749, 33.9446, 56.0089],
    [19.0236, 23.0100, 27.0968, 33.6418, 43.8606, 62.8228],
    [29.4353, 34.2693, 38.7202, 45.7859, 55.6425, 71.1470],
    [41.1617, 46.5081, 51.0612, 58.2046, 67.7145, 79.9491],
    [53.4727, 58.9644, 63.3514, 70.1245, 78.7004, 88.1374],
    [65.6019, 70.8626, 74.8257, 80.8038, 87.9164, 94.6963],
    [76.7941, 81.4622, 84.7698, 89.5775, 94.7887, 98.8124],
    [86.3525, 90.1031, 92.5645, 95.8994, 98.8894, 99.9998],
    [93.6822, 96.2474, 97.7247, 99.3760, 99.9999, 99.9999],
    [98.3268, 99.5126, 99.9290, 99.9999, 99.9999, 99.9999],
];

/// Expected iteration numbers, same layout.
pub const TABLE_E: [[f64; 6]; 10] = [
    [18.9130, 14.8909, 11.8242, 8.7816, 5.8919, 3.5709],
    [15.7699, 13.0378, 11.0714, 8.9175, 6.8398, 4.7753],
    [13.5891, 11.6722, 10.3305, 8.7363, 7.1887, 5.6222],
    [12.1472, 10.7508, 9.7922, 8.5904, 7.3839, 6.2540],
    [11.2207, 10.1756, 9.4710, 8.5562, 7.6238, 6.8076],
    [10.6704, 9.8783, 9.3551, 8.6630, 7.9621, 7.3921],
    [10.4175, 9.8205, 9.4373, 8.9308, 8.4398, 8.0962],
    [10.4224, 9.9886, 9.7229, 9.3848, 9.1011, 9.0000],
    [10.6744, 10.3899, 10.2328, 10.0628, 10.0000, 10.0000],
    [11.1872, 11.0539, 11.0078, 11.0000, 11.0000, 11.0000],
];

/// k_tot of the per-column minimum, m = 2..=7.
pub const TABLE_E_ARGMIN: [u64; 6] = [8, 8, 7, 6, 2, 2];
