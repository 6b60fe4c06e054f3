use num_complex::Complex64;
use xxz_core::operators::ModelParams;

/// Single-particle chain written from the spin picture: Ising energy 1/2 per
/// broken bond, boundary field beta at both ends, hopping -1/(2 Delta).
pub fn chain_green(params: &ModelParams, w: &[f64], z: Complex64, u: usize, v: usize) -> Complex64 {
    let n = w.len();
    let hop = Complex64::new(-1.0 / (2.0 * params.anisotropy), 0.0);
    let diag: Vec<Complex64> = (0..n)
        .map(|x| {
            let ends = usize::from(x == 0) + usize::from(x == n - 1);
            let broken = 2 - ends;
            Complex64::new(0.5 * broken as f64 + params.disorder * w[x] + params.boundary * ends as f64, 0.0) - z
        })
        .collect();
    // Thomas algorithm for (H - z) g = e_v
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let rhs = if i == v { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        let (den, prev_d) = if i == 0 { (diag[0], Complex64::new(0.0, 0.0)) } else { (diag[i] - hop * c[i - 1], d[i - 1]) };
        c[i] = hop / den;
        d[i] = (rhs - hop * prev_d) / den;
    }
    let mut g = d.clone();
    for i in (0..n - 1).rev() {
        g[i] = d[i] - c[i] * g[i + 1];
    }
    g[u]
}

