//! Independent oracles for the cosine-Galerkin residual and its Jacobian.

use lle_bifurcation::continuation::galerkin::fixed_point_weights;
use lle_bifurcation::continuation::{ambient_morse, FourierState, Galerkin};
use lle_bifurcation::spectral::mode_eigenvalues;
use lle_bifurcation::trivial::eval_trivial;
use lle_bifurcation::Params;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference() -> Params {
    Params::new(0.1, 1.6).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, modes: usize, sym_div: usize) -> FourierState {
    let mut s = FourierState::zeros(modes, rng.gen_range(-1.0..3.0), sym_div);
    for l in (0..=modes).filter(|l| l % sym_div == 0) {
        let decay = 1.0 / (1.0 + l as f64);
        s.coeffs[l] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay;
    }
    s
}

/// `[|a|^2 a]_l` from the product rule
/// `cos A cos B cos C = (cos(A+B+C) + cos(A+B-C) + cos(A-B+C) + cos(-A+B+C)) / 4`.
fn cubic_by_convolution(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (l1, a) in c.iter().enumerate() {
        for (l2, b) in c.iter().enumerate() {
            for (l3, e) in c.iter().enumerate() {
                let w = a * b * e.conj() * 0.25;
                let (l1, l2, l3) = (l1 as i64, l2 as i64, l3 as i64);
                for m in [l1 + l2 + l3, l1 + l2 - l3, l1 - l2 + l3, -l1 + l2 + l3] {
                    let m = m.unsigned_abs() as usize;
                    if m < n {
                        out[m] += w;
                    }
                }
            }
        }
    }
    out
}

#[test]
fn residual_matches_convolution_oracle() {
    let p = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for modes in [1, 4, 8] {
        let g = Galerkin::new(modes, 3 * modes + 1).unwrap();
        for _ in 0..5 {
            let s = random_state(&mut rng, modes, 1);
            let cubic = cubic_by_convolution(&s.coeffs);
            let r = g.residual(&s, &p).unwrap();
            for l in 0..=modes {
                let lin = Complex64::new(-p.d * (l * l) as f64 - s.zeta, 1.0) * s.coeffs[l];
                let forcing = if l == 0 { Complex64::new(0.0, p.f) } else { Complex64::new(0.0, 0.0) };
                let expect = lin + cubic[l] - forcing;
                let got = Complex64::new(r[2 * l], r[2 * l + 1]);
                assert!((got - expect).norm() < 1e-12, "L={modes} l={l}: {got} vs {expect}");
            }
        }
    }
}

fn relative_fd_error(g: &Galerkin, s: &FourierState, p: &Params) -> f64 {
    let jac = g.jacobian(s, p).unwrap();
    let n = jac.ncols();
    let u = s.to_vector();
    let h = 1e-6;
    let mut fd = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut up = u.clone();
        let mut dn = u.clone();
        up[j] += h;
        dn[j] -= h;
        let rp = g.residual(&FourierState::from_vector(&up, 1), p).unwrap();
        let rm = g.residual(&FourierState::from_vector(&dn, 1), p).unwrap();
        for i in 0..n {
            fd[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    (jac - &fd).norm() / fd.norm()
}

#[test]
fn jacobian_matches_central_differences() {
    let p = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = Galerkin::new(8, 24).unwrap();
    for _ in 0..20 {
        let s = random_state(&mut rng, 8, 1);
        let err = relative_fd_error(&g, &s, &p);
        assert!(err < 1e-6, "relative error {err}");
    }
}

#[test]
fn jacobian_preserves_divisibility_classes() {
    let p = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = Galerkin::new(12, 36).unwrap();
    for s_div in [2, 3, 4, 6] {
        let s = random_state(&mut rng, 12, s_div);
        let jac = g.jacobian(&s, &p).unwrap();
        let mut off = 0.0f64;
        for i in 0..jac.nrows() {
            for j in 0..jac.ncols() {
                if (i / 2) % s_div != 0 && (j / 2) % s_div == 0 {
                    off = off.max(jac[(i, j)].abs());
                }
            }
        }
        assert!(off < 1e-12, "sym_div={s_div}: {off}");
    }
}

#[test]
fn mode_blocks_reproduce_the_analytic_spectrum() {
    let p = reference();
    let modes = 8;
    let g = Galerkin::new(modes, 3 * modes).unwrap();
    let w = fixed_point_weights(modes, &p);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 10 {
        let t = rng.gen_range(-0.95..0.95);
        let tp = eval_trivial(t, &p).unwrap();
        let s = FourierState::trivial(&tp, modes, 1);
        let jac = g.jacobian(&s, &p).unwrap();
        let mut total = 0;
        for l in 0..=modes {
            let spec = mode_eigenvalues(t, l, &p).unwrap();
            let (i, j) = (2 * l, 2 * l + 1);
            let blk = DMatrix::from_row_slice(2, 2, &[
                -jac[(i, i)] / w[i], -jac[(i, j)] / w[i], //
                -jac[(j, i)] / w[j], -jac[(j, j)] / w[j],
            ]);
            let tr = blk.trace();
            let det = blk.determinant();
            let disc = tr * tr / 4.0 - det;
            if spec.complex_pair {
                assert!(disc < 1e-12, "t={t} l={l}");
            } else {
                let sq = disc.max(0.0).sqrt();
                let mut ev = [tr / 2.0 - sq, tr / 2.0 + sq];
                ev.sort_by(f64::total_cmp);
                for (a, b) in ev.iter().zip(&spec.roots) {
                    assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "t={t} l={l}: {a} vs {b}");
                    assert_eq!(a.signum(), b.signum());
                }
            }
            total += spec.negative_count();
        }
        assert_eq!(ambient_morse(&s, 1, &g, &p).unwrap(), total, "t={t}");
        checked += 1;
    }
}
