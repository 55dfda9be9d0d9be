//! Continuous functional calculus for rectangular and normal matrices via
//! the inverse Gel'fand transform of the category generated by one arrow.

use crate::cstarcat::generated_by;
use crate::duality::spectrum_nonunital;
use crate::error::{Error, Result};
use crate::numkit::{schur, svd, Matrix, C64, ONE, ZERO};

/// Scalar function on the spectrum. For a block between distinct objects the
/// variable is the singular value; on an endomorphism it is the eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralFunction {
    /// `(point, value)` pairs; points must match the spectrum exactly.
    Table(Vec<(C64, C64)>),
    /// Coefficients `c_0, c_1, …` of `Σ c_k z^k`.
    Polynomial(Vec<C64>),
}

impl SpectralFunction {
    pub fn identity() -> Self {
        SpectralFunction::Polynomial(vec![ZERO, ONE])
    }

    /// Evaluates at `z`, matching table points within `cut`.
    pub fn eval(&self, z: C64, cut: f64) -> Result<C64> {
        match self {
            SpectralFunction::Polynomial(c) => Ok(c.iter().rev().fold(ZERO, |acc, ck| acc * z + ck)),
            SpectralFunction::Table(t) => {
                let hits: Vec<C64> = t.iter().filter(|(p, _)| (p - z).norm() <= cut).map(|(_, v)| *v).collect();
                match hits.first() {
                    None => Err(Error::SpectrumMismatch(format!("no table entry for spectrum point {z}"))),
                    Some(v) if hits.iter().all(|w| (w - v).norm() <= cut) => Ok(*v),
                    Some(_) => Err(Error::SpectrumMismatch(format!("table is multi-valued at {z}"))),
                }
            }
        }
    }

    /// `z ↦ conj f(conj z)`, the function whose calculus on `x*` is the
    /// adjoint of this one's on `x`.
    pub fn adjoint(&self) -> Self {
        match self {
            SpectralFunction::Polynomial(c) => SpectralFunction::Polynomial(c.iter().map(C64::conj).collect()),
            SpectralFunction::Table(t) => SpectralFunction::Table(t.iter().map(|(p, v)| (p.conj(), v.conj())).collect()),
        }
    }

    fn check_coverage(&self, points: &[C64], cut: f64) -> Result<()> {
        if let SpectralFunction::Table(t) = self {
            if let Some((p, _)) = t.iter().find(|(p, _)| points.iter().all(|z| (p - z).norm() > cut)) {
                return Err(Error::SpectrumMismatch(format!("table point {p} is not in the spectrum")));
            }
        }
        Ok(())
    }
}

fn normality_residual(x: &Matrix) -> Result<f64> {
    if !x.is_square() {
        return Err(Error::Shape(format!("endomorphism must be square, got {:?}", x.shape())));
    }
    let xs = x.adjoint();
    Ok((&(x * &xs) - &(&xs * x)).hs_norm())
}

fn require_normal(x: &Matrix, tol: f64) -> Result<()> {
    let r = normality_residual(x)?;
    let n = x.hs_norm();
    if r > tol * (1.0 + n * n) {
        return Err(Error::NotNormal { index: 0, residual: r });
    }
    Ok(())
}

fn clustering_cut(scale: f64) -> f64 {
    1e-8 * scale.max(1.0)
}

fn cluster(mut points: Vec<C64>, cut: f64) -> Vec<C64> {
    let mut out: Vec<(C64, usize)> = Vec::new();
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    for z in points {
        match out.iter_mut().find(|(c, n)| (*c / *n as f64 - z).norm() <= cut) {
            Some((c, n)) => {
                *c += z;
                *n += 1;
            }
            None => out.push((z, 1)),
        }
    }
    out.into_iter().map(|(c, n)| c / n as f64).collect()
}

/// Distinct nonzero singular values (distinct objects) or distinct nonzero
/// eigenvalues (one object, normal `x`), sorted.
pub fn spectrum_of_element(x: &Matrix, a: &str, b: &str, tol: f64) -> Result<Vec<C64>> {
    if a == b {
        require_normal(x, tol)?;
        let (_, t) = schur(x)?;
        let diag = t.diagonal();
        let scale = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let cut = clustering_cut(scale);
        Ok(cluster(diag.into_iter().filter(|z| z.norm() > cut).collect(), cut))
    } else {
        let s = svd(x).singular_values;
        let cut = clustering_cut(s.first().copied().unwrap_or(0.0));
        Ok(cluster(s.into_iter().filter(|&v| v > cut).map(|v| C64::new(v, 0.0)).collect(), cut))
    }
}

/// `f(x)` as the inverse Gel'fand transform of the section `f` on the
/// spectrum of `C(x)`. The zero character of the non-unital `C(x)` is not a
/// spectrum point.
pub fn funcalc(x: &Matrix, a: &str, b: &str, f: &SpectralFunction, tol: f64) -> Result<Matrix> {
    let same = a == b;
    if same {
        require_normal(x, tol)?;
    }
    if x.max_abs() == 0.0 {
        f.check_coverage(&[], 0.0)?;
        return Ok(Matrix::zeros(x.rows(), x.cols()));
    }
    let c = generated_by(x, a, b, tol)?;
    let sp = spectrum_nonunital(&c, tol)?;
    let (ia, ib) = if same { (0, 0) } else { (0, 1) };
    let coeffs = sp.transform(ia, ib, x);
    let points: Vec<C64> = coeffs
        .iter()
        .map(|z| if same { *z } else { C64::new(z.norm(), 0.0) })
        .collect();
    let cut = clustering_cut(points.iter().map(|z| z.norm()).fold(0.0, f64::max));
    f.check_coverage(&points, cut)?;
    let mut section = Vec::with_capacity(points.len());
    for (z, xhat) in points.iter().zip(&coeffs) {
        let v = f.eval(*z, cut)?;
        section.push(if same { v } else { v * xhat / xhat.norm() });
    }
    Ok(sp.inverse_transform(ia, ib, &section))
}

/// Independent oracle: `Σ f(s_i) u_i v_i*` over nonzero singular values, or
/// `Σ f(t_ii) q_i q_i*` from the Schur form of a normal `x`.
pub fn svd_oracle(x: &Matrix, a: &str, b: &str, f: &SpectralFunction, tol: f64) -> Result<Matrix> {
    let mut out = Matrix::zeros(x.rows(), x.cols());
    if a == b {
        require_normal(x, tol)?;
        let (q, t) = schur(x)?;
        let diag = t.diagonal();
        let cut = clustering_cut(diag.iter().map(|z| z.norm()).fold(0.0, f64::max));
        for (i, z) in diag.iter().enumerate() {
            if z.norm() > cut {
                let qi = q.select_columns(&[i]);
                out.axpy(f.eval(*z, cut)?, &(&qi * &qi.adjoint()));
            }
        }
    } else {
        let d = svd(x);
        let cut = clustering_cut(d.singular_values.first().copied().unwrap_or(0.0));
        for (i, &s) in d.singular_values.iter().enumerate() {
            if s > cut {
                let ui = d.left.select_columns(&[i]);
                let vi = d.right.select_columns(&[i]);
                out.axpy(f.eval(C64::new(s, 0.0), cut)?, &(&ui * &vi.adjoint()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{op_norm, random_matrix, random_unitary, I};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn r(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn identity_returns_x() {
        let x = Matrix::from_real_rows(&[&[3.0, 4.0]]);
        let y = funcalc(&x, "A", "B", &SpectralFunction::identity(), TOL).unwrap();
        assert!((&y - &x).hs_norm() < 1e-12);
        let t = SpectralFunction::Table(vec![(r(5.0), r(5.0))]);
        let y = funcalc(&x, "A", "B", &t, TOL).unwrap();
        assert!((&y - &x).hs_norm() < 1e-12);
    }

    #[test]
    fn square_root_of_a_row() {
        let x = Matrix::from_real_rows(&[&[3.0, 4.0]]);
        let t = SpectralFunction::Table(vec![(r(5.0), r(5f64.sqrt()))]);
        let y = funcalc(&x, "A", "B", &t, TOL).unwrap();
        let expected = x.scale_real(1.0 / 5f64.sqrt());
        assert!((&y - &expected).hs_norm() < 1e-12);
        assert!((&svd_oracle(&x, "A", "B", &t, TOL).unwrap() - &expected).hs_norm() < 1e-12);
    }

    #[test]
    fn table_must_match_the_spectrum() {
        let x = Matrix::from_real_rows(&[&[3.0, 4.0]]);
        let t = SpectralFunction::Table(vec![(r(4.0), r(1.0))]);
        assert!(matches!(funcalc(&x, "A", "B", &t, TOL), Err(Error::SpectrumMismatch(_))));
        let t = SpectralFunction::Table(vec![(r(5.0), r(1.0)), (r(7.0), r(1.0))]);
        assert!(matches!(funcalc(&x, "A", "B", &t, TOL), Err(Error::SpectrumMismatch(_))));
    }

    #[test]
    fn cube_matches_the_product_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_matrix(6, 4, &mut rng);
        let cube = SpectralFunction::Polynomial(vec![ZERO, ZERO, ZERO, ONE]);
        let direct = &(&x * &x.adjoint()) * &x;
        assert!((&svd_oracle(&x, "A", "B", &cube, TOL).unwrap() - &direct).hs_norm() < 1e-10);
        assert!((&funcalc(&x, "A", "B", &cube, TOL).unwrap() - &direct).hs_norm() < 1e-9);
    }

    #[test]
    fn normal_sign_function() {
        let x = Matrix::diag(&[I, -I]);
        let t = SpectralFunction::Table(vec![(I, ONE), (-I, -ONE)]);
        let expected = Matrix::diag_real(&[1.0, -1.0]);
        assert!((&svd_oracle(&x, "A", "A", &t, TOL).unwrap() - &expected).hs_norm() < 1e-12);
        assert!((&funcalc(&x, "A", "A", &t, TOL).unwrap() - &expected).hs_norm() < 1e-12);
    }

    #[test]
    fn non_normal_endomorphism_is_rejected() {
        let nil = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let f = SpectralFunction::identity();
        assert!(matches!(funcalc(&nil, "A", "A", &f, TOL), Err(Error::NotNormal { .. })));
        assert!(matches!(spectrum_of_element(&nil, "A", "A", TOL), Err(Error::NotNormal { .. })));
        // as an arrow between distinct objects it has one singular value
        assert_eq!(spectrum_of_element(&nil, "A", "B", TOL).unwrap(), vec![ONE]);
        let y = funcalc(&nil, "A", "B", &f, TOL).unwrap();
        assert!((&y - &nil).hs_norm() < 1e-12);
    }

    #[test]
    fn element_spectra() {
        let s = spectrum_of_element(&Matrix::from_real_rows(&[&[3.0, 4.0]]), "A", "B", TOL).unwrap();
        assert!(s.len() == 1 && (s[0] - r(5.0)).norm() < 1e-12);
        let s = spectrum_of_element(&Matrix::diag_real(&[2.0, 2.0, 3.0]), "A", "A", TOL).unwrap();
        assert!(s.len() == 2 && (s[0] - r(2.0)).norm() < 1e-12 && (s[1] - r(3.0)).norm() < 1e-12);
        // zero is not a spectrum point of C(x)
        let s = spectrum_of_element(&Matrix::diag_real(&[0.0, 1.0]), "A", "A", TOL).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn zero_has_empty_spectrum() {
        let z = Matrix::zeros(2, 3);
        assert!(spectrum_of_element(&z, "A", "B", TOL).unwrap().is_empty());
        let y = funcalc(&z, "A", "B", &SpectralFunction::Table(vec![]), TOL).unwrap();
        assert_eq!(y.max_abs(), 0.0);
        let t = SpectralFunction::Table(vec![(ONE, ONE)]);
        assert!(funcalc(&z, "A", "B", &t, TOL).is_err());
    }

    #[test]
    fn adjoint_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = random_matrix(5, 3, &mut rng);
        let f = SpectralFunction::Polynomial(vec![ZERO, C64::new(0.5, 1.0), ZERO, C64::new(-0.2, 0.3)]);
        let fx = funcalc(&x, "A", "B", &f, TOL).unwrap();
        let gx = funcalc(&x.adjoint(), "B", "A", &f.adjoint(), TOL).unwrap();
        assert!((&gx - &fx.adjoint()).hs_norm() < 1e-9);
        let spec = spectrum_of_element(&x, "A", "B", TOL).unwrap();
        let fmax = spec.iter().map(|s| f.eval(*s, 0.0).unwrap().norm()).fold(0.0, f64::max);
        assert!((op_norm(&fx) - fmax).abs() < 1e-9);

        // normal case with a singular direction
        let u = random_unitary(4, &mut rng);
        let d = Matrix::diag(&[ZERO, I, C64::new(2.0, 1.0), I]);
        let x = &(&u * &d) * &u.adjoint();
        let fx = funcalc(&x, "A", "A", &f, TOL).unwrap();
        let gx = funcalc(&x.adjoint(), "A", "A", &f.adjoint(), TOL).unwrap();
        assert!((&gx - &fx.adjoint()).hs_norm() < 1e-9);
        assert!((&fx - &svd_oracle(&x, "A", "A", &f, TOL).unwrap()).hs_norm() < 1e-9);
    }

    #[test]
    fn indicator_gives_scaled_partial_isometry() {
        let x = Matrix::from_real_rows(&[&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let t = SpectralFunction::Table(vec![(r(2.0), r(2.0)), (r(1.0), ZERO)]);
        let y = funcalc(&x, "A", "B", &t, TOL).unwrap();
        let proj = &y * &y.adjoint();
        assert!((&proj - &Matrix::diag_real(&[4.0, 0.0])).hs_norm() < 1e-12);
    }
}
