//! Gauss-Legendre rules on the reference cell `[-1/2, 1/2]`.

/// Two-point rule: nodes and weights (weights sum to one).
pub const GAUSS2: [(f64, f64); 2] = [
    (-0.288_675_134_594_812_9, 0.5),
    (0.288_675_134_594_812_9, 0.5),
];

/// Three-point rule: nodes and weights (weights sum to one).
pub const GAUSS3: [(f64, f64); 3] = [
    (-0.387_298_334_620_741_7, 5.0 / 18.0),
    (0.0, 8.0 / 18.0),
    (0.387_298_334_620_741_7, 5.0 / 18.0),
];

/// Mean of `f` over `[x - dx/2, x + dx/2]` with the three-point rule.
pub fn cell_mean(x: f64, dx: f64, f: impl Fn(f64) -> f64) -> f64 {
    GAUSS3.iter().map(|&(xi, w)| w * f(x + xi * dx)).sum()
}

/// Mean of `f` over a rectangle with the tensor three-point rule.
pub fn cell_mean_2d(x: f64, y: f64, dx: f64, dy: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for &(xi, wx) in &GAUSS3 {
        for &(eta, wy) in &GAUSS3 {
            acc += wx * wy * f(x + xi * dx, y + eta * dy);
        }
    }
    acc
}
