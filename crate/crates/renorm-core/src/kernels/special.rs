//! Exponentially scaled modified Bessel functions and Gauss–Legendre rules.

/// e^{−x} I_k(x) for k = 0..=kmax, x ≥ 0.
pub fn scaled_bessel_i(x: f64, kmax: usize, out: &mut [f64]) {
    assert!(out.len() > kmax);
    if x == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = 1.0;
        return;
    }
    if x > 30.0 + (kmax * kmax) as f64 {
        for (k, o) in out.iter_mut().enumerate().take(kmax + 1) {
            *o = asymptotic(x, k);
        }
        return;
    }
    // Miller's backward recurrence I_{k−1} = (2k/x) I_k + I_{k+1}, normalized
    // by e^x = I_0 + 2 Σ_{k≥1} I_k.
    let start = kmax + 20 + (x + 12.0 * x.sqrt()) as usize;
    let (mut hi, mut cur) = (0.0f64, 1e-300f64);
    let mut sum = 0.0;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in (1..=start).rev() {
        let lo = 2.0 * k as f64 / x * cur + hi;
        hi = cur;
        cur = lo;
        if k - 1 <= kmax {
            out[k - 1] = cur;
        }
        if k > 1 {
            sum += 2.0 * cur;
        }
        if cur > 1e250 {
            let s = 1e-250;
            cur *= s;
            hi *= s;
            sum *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    sum += cur;
    out.iter_mut().take(kmax + 1).for_each(|v| *v /= sum);
}

/// Large-x expansion e^{−x}I_k(x) ≈ (2πx)^{−1/2} Σ_j (−1)^j a_j(k) x^{−j}.
fn asymptotic(x: f64, k: usize) -> f64 {
    let mu = 4.0 * (k * k) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..200 {
        let odd = (2 * j - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * j as f64 * x);
        if next.abs() > term.abs() && j > 2 {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Coefficients of the large-x series of e^{−x}I_k(x)·√(2πx) in powers of 1/x.
pub fn asymptotic_coefficients(k: usize, terms: usize) -> Vec<f64> {
    let mu = 4.0 * (k * k) as f64;
    let mut c = vec![1.0];
    for j in 1..terms {
        let odd = (2 * j - 1) as f64;
        let prev = c[j - 1];
        c.push(-prev * (mu - odd * odd) / (8.0 * j as f64));
    }
    c
}

/// n-point Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_matches_series_and_asymptotics_agree() {
        // Power series I_k(x) = Σ (x/2)^{2m+k}/(m!(m+k)!) at moderate x.
        for &x in &[0.01, 0.7, 3.0, 12.5] {
            let mut out = vec![0.0; 9];
            scaled_bessel_i(x, 8, &mut out);
            for (k, &got) in out.iter().enumerate() {
                let mut term = (x / 2.0f64).powi(k as i32) / (1..=k).map(|v| v as f64).product::<f64>();
                let mut s = 0.0;
                for m in 0..200 {
                    s += term;
                    term *= (x / 2.0) * (x / 2.0) / ((m + 1) as f64 * (m + 1 + k) as f64);
                }
                let want = (-x).exp() * s;
                assert!((got - want).abs() <= 1e-13 * want, "x={x} k={k} {got} {want}");
            }
        }
        // Both branches near the switch point.
        for k in 0..5 {
            let x = 30.0 + 16.0 + 0.5;
            let mut out = vec![0.0; 5];
            scaled_bessel_i(x, 4, &mut out);
            assert!((out[k] - asymptotic(x, k)).abs() < 1e-14 * out[k]);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
