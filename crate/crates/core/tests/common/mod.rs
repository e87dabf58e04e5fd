//! Independent reference computations for tests: adaptive Gauss–Kronrod
//! quadrature and direct Biot–Savart line integrals.
#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::PI;

use nalgebra::Vector3;

pub type V3 = Vector3<f64>;

const MU0: f64 = 4e-7 * PI;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7K15 panel: Kronrod estimate and the QUADPACK error estimate
/// (largest over components).
fn gk15<const N: usize>(f: &impl Fn(f64) -> [f64; N], a: f64, b: f64) -> ([f64; N], f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fs = [[0.0; N]; 15];
    fs[7] = f(c);
    for j in 0..7 {
        fs[j] = f(c - h * XGK[j]);
        fs[14 - j] = f(c + h * XGK[j]);
    }
    let node = |i: usize| if i <= 7 { i } else { 14 - i };
    let mut k = [0.0; N];
    let mut err = 0.0f64;
    for n in 0..N {
        let (mut kn, mut gn, mut abs) = (0.0, 0.0, 0.0);
        for (i, fi) in fs.iter().enumerate() {
            let j = node(i);
            kn += WGK[j] * fi[n];
            abs += WGK[j] * fi[n].abs();
            if j % 2 == 1 {
                gn += WG[j / 2] * fi[n];
            }
        }
        let mean = 0.5 * kn;
        let asc: f64 = fs
            .iter()
            .enumerate()
            .map(|(i, fi)| WGK[node(i)] * (fi[n] - mean).abs())
            .sum();
        let (kn, gn, abs, asc) = (kn * h, gn * h, abs * h.abs(), asc * h.abs());
        let mut e = (kn - gn).abs();
        if asc != 0.0 && e != 0.0 {
            e = asc * (200.0 * e / asc).powf(1.5).min(1.0);
        }
        e = e.max(50.0 * f64::EPSILON * abs);
        k[n] = kn;
        err = err.max(e);
    }
    (k, err)
}

/// Globally adaptive G7K15 quadrature of a vector integrand: the panel with
/// the largest error estimate is bisected until the summed estimate is below
/// `tol` or 2000 panels are in use.
pub fn integrate<const N: usize>(
    f: impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    tol: f64,
) -> [f64; N] {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    loop {
        let total_err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if total_err <= tol || parts.len() >= 2000 {
            break;
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
    let mut total = [0.0; N];
    for (_, _, (est, _)) in &parts {
        for n in 0..N {
            total[n] += est[n];
        }
    }
    total
}

pub fn integrate_scalar(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    integrate(|x| [f(x)], a, b, tol)[0]
}

/// `K(m)` and `E(m)` from their trigonometric integral forms.
pub fn elliptic_quadrature(m: f64) -> (f64, f64) {
    let k = integrate_scalar(
        |t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(),
        0.0,
        PI / 2.0,
        1e-13,
    );
    let e = integrate_scalar(|t| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-13);
    (k, e)
}

fn dbiot(dl: V3, from: V3, to: V3) -> V3 {
    let r = to - from;
    dl.cross(&r) / r.norm().powi(3)
}

/// Field of a circular loop by direct line integration, `tol` in tesla.
pub fn loop_field_quadrature(
    center: V3,
    axis: V3,
    radius: f64,
    current: f64,
    p: V3,
    tol: f64,
) -> V3 {
    let n = axis.normalize();
    let seed = if n.x.abs() < 0.9 { V3::x() } else { V3::y() };
    let u = (seed - n * n.dot(&seed)).normalize();
    let v = n.cross(&u);
    let k = MU0 * current / (4.0 * PI);
    let r = integrate(
        |phi| {
            let (s, c) = phi.sin_cos();
            let x = center + (u * c + v * s) * radius;
            let dl = (v * c - u * s) * radius;
            let b = dbiot(dl, x, p) * k;
            [b.x, b.y, b.z]
        },
        0.0,
        2.0 * PI,
        tol,
    );
    V3::new(r[0], r[1], r[2])
}

/// Field of a straight segment by direct line integration, `tol` in tesla.
pub fn segment_field_quadrature(start: V3, end: V3, current: f64, p: V3, tol: f64) -> V3 {
    let dl = end - start;
    let k = MU0 * current / (4.0 * PI);
    let r = integrate(
        |t| {
            let b = dbiot(dl, start + dl * t, p) * k;
            [b.x, b.y, b.z]
        },
        0.0,
        1.0,
        tol,
    );
    V3::new(r[0], r[1], r[2])
}

/// Distance from `p` to the loop wire.
pub fn loop_distance(center: V3, axis: V3, radius: f64, p: V3) -> f64 {
    let n = axis.normalize();
    let d = p - center;
    let h = d.dot(&n);
    let rho = (d - n * h).norm();
    ((rho - radius).powi(2) + h * h).sqrt()
}

/// Distance from `p` to the segment.
pub fn segment_distance(start: V3, end: V3, p: V3) -> f64 {
    let d = end - start;
    let t = ((p - start).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (p - (start + d * t)).norm()
}

#[test]
fn quadrature_polynomial_and_peaked() {
    let v = integrate_scalar(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, 1e-14);
    assert!((v - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    // Lorentzian peak of width 1e-4
    let w = 1e-4;
    let v = integrate_scalar(|x| w / (x * x + w * w), -1.0, 1.0, 1e-13);
    assert!((v - 2.0 * (1.0 / w).atan()).abs() < 1e-11);
}

/// Synthetic time-of-flight series: σ0 = 1 mm, 26 times over 0–25 ms.
pub fn tof_series(temperature: f64) -> Vec<quadtrap::device::TofSample> {
    (0..26)
        .map(|k| {
            let t = k as f64 * 1e-3;
            quadtrap::device::TofSample {
                t,
                sigma: quadtrap::device::expansion_sigma(temperature, 1e-3, t),
            }
        })
        .collect()
}

/// RMS relative errors of (T, σ0) over `trials` seeded fits with Gaussian
/// multiplicative noise of standard deviation `noise` on each σ.
pub fn tof_noise_rms(temperature: f64, noise: f64, trials: usize, seed: u64) -> (f64, f64) {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise).unwrap();
    let clean = tof_series(temperature);
    let (mut et, mut es) = (0.0, 0.0);
    for _ in 0..trials {
        let noisy: Vec<_> = clean
            .iter()
            .map(|s| quadtrap::device::TofSample {
                t: s.t,
                sigma: s.sigma * (1.0 + normal.sample(&mut rng)),
            })
            .collect();
        let fit = quadtrap::device::tof_fit(&noisy).unwrap();
        et += (fit.temperature / temperature - 1.0).powi(2);
        es += (fit.sigma0 / 1e-3 - 1.0).powi(2);
    }
    ((et / trials as f64).sqrt(), (es / trials as f64).sqrt())
}

/// Largest relative σ error over `trials` Gaussian fits (A = 1, μ = 0, σ = 1,
/// c = 0, 101 points on [-5, 5]) with uniform additive noise of half-width
/// `noise`.
pub fn gaussian_noise_worst(noise: f64, trials: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let profile: Vec<(f64, f64)> = (0..101)
            .map(|k| {
                let x = -5.0 + 0.1 * k as f64;
                (x, (-0.5 * x * x).exp() + rng.gen_range(-noise..noise))
            })
            .collect();
        let fit = quadtrap::device::fit_gaussian_1d(&profile).unwrap();
        worst = worst.max((fit.sigma.abs() - 1.0).abs());
    }
    worst
}
