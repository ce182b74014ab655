use super::linalg::{backward_solve, cholesky, dot, forward_solve};
use super::{check_dim, SpdMatrix};
use crate::Result;

/// A closed, convex, origin-symmetric unit ball `B` and its gauge `|z|_B`.
#[derive(Debug, Clone, PartialEq)]
pub enum BallSpec {
    L1,
    L2,
    Linf,
    /// Ellipsoid `{z : z^T S^{-1} z <= 1}` for the given shape matrix `S`.
    Mahalanobis(SpdMatrix),
}

impl BallSpec {
    /// Short lowercase name used on the command line and in CSV metadata.
    pub fn name(&self) -> &'static str {
        match self {
            BallSpec::L1 => "l1",
            BallSpec::L2 => "l2",
            BallSpec::Linf => "linf",
            BallSpec::Mahalanobis(_) => "mahalanobis",
        }
    }

    fn check(&self, len: usize) -> Result<()> {
        match self {
            BallSpec::Mahalanobis(s) => check_dim(s.dim(), len),
            _ => Ok(()),
        }
    }

    /// `|z|_B = inf { t : z in tB }`.
    pub fn norm(&self, z: &[f64]) -> Result<f64> {
        self.check(z.len())?;
        Ok(self.norm_unchecked(z))
    }

    pub(crate) fn norm_unchecked(&self, z: &[f64]) -> f64 {
        match self {
            BallSpec::L1 => z.iter().map(|v| v.abs()).sum(),
            BallSpec::L2 => dot(z, z).sqrt(),
            BallSpec::Linf => z.iter().fold(0.0, |m, v| m.max(v.abs())),
            BallSpec::Mahalanobis(s) => s.inv_quad_form(z).sqrt(),
        }
    }

    /// `|w|_* = sup { w^T z : z in B }`.
    pub fn dual_norm(&self, w: &[f64]) -> Result<f64> {
        self.check(w.len())?;
        Ok(self.dual_norm_unchecked(w))
    }

    pub(crate) fn dual_norm_unchecked(&self, w: &[f64]) -> f64 {
        match self {
            BallSpec::L1 => w.iter().fold(0.0, |m, v| m.max(v.abs())),
            BallSpec::L2 => dot(w, w).sqrt(),
            BallSpec::Linf => w.iter().map(|v| v.abs()).sum(),
            BallSpec::Mahalanobis(s) => s.quad_form(w).max(0.0).sqrt(),
        }
    }

    /// A maximizer of `w^T z` over `beta B`. The origin when `w = 0`.
    pub fn support_point(&self, w: &[f64], beta: f64) -> Result<Vec<f64>> {
        self.check(w.len())?;
        let d = w.len();
        let mut z = vec![0.0; d];
        if beta == 0.0 || w.iter().all(|&v| v == 0.0) {
            return Ok(z);
        }
        match self {
            BallSpec::L1 => {
                let (idx, _) = w.iter().enumerate().fold((0, -1.0), |(bi, bv), (i, v)| {
                    if v.abs() > bv {
                        (i, v.abs())
                    } else {
                        (bi, bv)
                    }
                });
                z[idx] = beta * w[idx].signum();
            }
            BallSpec::L2 => {
                let n = dot(w, w).sqrt();
                z.iter_mut().zip(w).for_each(|(zi, wi)| *zi = beta * wi / n);
            }
            BallSpec::Linf => {
                z.iter_mut()
                    .zip(w)
                    .for_each(|(zi, &wi)| *zi = if wi == 0.0 { 0.0 } else { beta * wi.signum() });
            }
            BallSpec::Mahalanobis(s) => {
                let sw = s.mul_vec(w);
                let n = dot(w, &sw).sqrt();
                z.iter_mut().zip(&sw).for_each(|(zi, v)| *zi = beta * v / n);
            }
        }
        Ok(z)
    }

    /// Euclidean projection of `x` onto `beta B`.
    pub fn project(&self, x: &[f64], beta: f64) -> Result<Vec<f64>> {
        self.check(x.len())?;
        Ok(self.project_unchecked(x, beta))
    }

    pub(crate) fn project_unchecked(&self, x: &[f64], beta: f64) -> Vec<f64> {
        if beta <= 0.0 {
            return vec![0.0; x.len()];
        }
        match self {
            BallSpec::Linf => x.iter().map(|v| v.clamp(-beta, beta)).collect(),
            BallSpec::L2 => {
                let n = dot(x, x).sqrt();
                if n <= beta {
                    x.to_vec()
                } else {
                    x.iter().map(|v| v * beta / n).collect()
                }
            }
            BallSpec::L1 => project_l1(x, beta),
            BallSpec::Mahalanobis(s) => project_ellipsoid(x, s, beta),
        }
    }
}

/// Sort-and-threshold projection onto `{ z : |z|_1 <= beta }`.
fn project_l1(x: &[f64], beta: f64) -> Vec<f64> {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if l1 <= beta {
        return x.to_vec();
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - beta) / (i + 1) as f64;
        if m > t {
            theta = t;
        } else {
            break;
        }
    }
    x.iter()
        .map(|&v| v.signum() * (v.abs() - theta).max(0.0))
        .collect()
}

/// Projection onto `{ z : z^T S^{-1} z <= beta^2 }`.
///
/// Stationarity gives `z = S (S + lambda I)^{-1} x` for a multiplier
/// `lambda >= 0`; with `u = (S + lambda I)^{-1} x` the constraint reads
/// `phi(lambda) = u^T S u = beta^2`. Newton runs on `1/sqrt(phi) - 1/beta`,
/// which is close to linear in `lambda`, inside a bisection bracket.
fn project_ellipsoid(x: &[f64], s: &SpdMatrix, beta: f64) -> Vec<f64> {
    let d = x.len();
    if s.inv_quad_form(x) <= beta * beta {
        return x.to_vec();
    }
    let shape = s.as_slice();
    let eval = |lambda: f64| -> (f64, f64, Vec<f64>) {
        let mut shifted = shape.to_vec();
        for i in 0..d {
            shifted[i * d + i] += lambda;
        }
        let l = cholesky(d, &shifted).expect("S + lambda I is SPD for lambda >= 0");
        let mut u = x.to_vec();
        forward_solve(d, &l, &mut u);
        backward_solve(d, &l, &mut u);
        let z = s.mul_vec(&u);
        let phi = dot(&u, &z);
        let mut v = u.clone();
        forward_solve(d, &l, &mut v);
        backward_solve(d, &l, &mut v);
        let dphi = -2.0 * dot(&z, &v);
        (phi, dphi, z)
    };

    let target = 1.0 / beta;
    let mut lo = 0.0;
    let xnorm = dot(x, x).sqrt();
    let mut hi = xnorm * s.max_eigenvalue().sqrt() / beta;
    let mut lambda = 0.0;
    let mut best = None;
    for _ in 0..200 {
        let (phi, dphi, z) = eval(lambda);
        let h = 1.0 / phi.sqrt() - target;
        if (phi - beta * beta).abs() <= 1e-12 * beta * beta {
            best = Some(z);
            break;
        }
        if h < 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        best = Some(z);
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
        // dh/dlambda = -phi' / (2 phi^{3/2})
        let dh = -dphi / (2.0 * phi * phi.sqrt());
        let step = lambda - h / dh;
        lambda = if dh > 0.0 && step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
    }
    let mut z = best.expect("at least one Newton evaluation");
    let n = s.inv_quad_form(&z).sqrt();
    if n > beta {
        z.iter_mut().for_each(|v| *v *= beta / n);
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spd2() -> SpdMatrix {
        SpdMatrix::new(2, vec![2.0, 0.6, 0.6, 1.0]).unwrap()
    }

    fn balls() -> Vec<BallSpec> {
        vec![
            BallSpec::L1,
            BallSpec::L2,
            BallSpec::Linf,
            BallSpec::Mahalanobis(spd2()),
        ]
    }

    #[test]
    fn norms_of_three_four() {
        let z = [3.0, -4.0];
        assert_eq!(BallSpec::L2.norm(&z).unwrap(), 5.0);
        assert_eq!(BallSpec::Linf.norm(&z).unwrap(), 4.0);
        assert_eq!(BallSpec::L1.norm(&z).unwrap(), 7.0);
        assert_eq!(BallSpec::Linf.dual_norm(&z).unwrap(), 7.0);
        assert_eq!(BallSpec::L2.dual_norm(&z).unwrap(), 5.0);
        assert_eq!(BallSpec::L1.dual_norm(&z).unwrap(), 4.0);
    }

    #[test]
    fn mahalanobis_dimension_is_checked() {
        let b = BallSpec::Mahalanobis(spd2());
        assert!(b.norm(&[1.0, 2.0, 3.0]).is_err());
        assert!(b.dual_norm(&[1.0]).is_err());
        assert!(b.project(&[1.0], 1.0).is_err());
    }

    #[test]
    fn support_points() {
        assert_eq!(
            BallSpec::Linf.support_point(&[1.0, -2.0], 1.0).unwrap(),
            vec![1.0, -1.0]
        );
        for b in balls() {
            assert_eq!(b.support_point(&[0.0, 0.0], 3.0).unwrap(), vec![0.0, 0.0]);
        }
        let z = BallSpec::L2.support_point(&[3.0, 4.0], 2.0).unwrap();
        assert!((z[0] - 1.2).abs() < 1e-15 && (z[1] - 1.6).abs() < 1e-15);
        assert_eq!(
            BallSpec::L1.support_point(&[1.0, -3.0], 2.0).unwrap(),
            vec![0.0, -2.0]
        );
    }

    #[test]
    fn projections() {
        assert_eq!(
            BallSpec::Linf.project(&[2.0, 0.5], 1.0).unwrap(),
            vec![1.0, 0.5]
        );
        assert_eq!(
            BallSpec::L2.project(&[3.0, 4.0], 5.0).unwrap(),
            vec![3.0, 4.0]
        );
        let p = BallSpec::L1.project(&[2.0, 0.0], 1.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
    }

    #[test]
    fn l1_projection_matches_grid_search() {
        // brute-force minimization of |x - z|_2 over a fine grid of the l1 ball
        for x in [[2.0, 0.0], [0.7, 0.9], [-1.5, 0.4], [0.3, -0.2]] {
            let p = project_l1(&x, 1.0);
            let n = 801;
            let mut best = (f64::INFINITY, [0.0, 0.0]);
            for i in 0..n {
                for j in 0..n {
                    let z = [
                        -1.0 + 2.0 * i as f64 / (n - 1) as f64,
                        -1.0 + 2.0 * j as f64 / (n - 1) as f64,
                    ];
                    if z[0].abs() + z[1].abs() > 1.0 + 1e-12 {
                        continue;
                    }
                    let dist = (x[0] - z[0]).powi(2) + (x[1] - z[1]).powi(2);
                    if dist < best.0 {
                        best = (dist, z);
                    }
                }
            }
            assert!(
                (p[0] - best.1[0]).abs() <= 2.5e-3 && (p[1] - best.1[1]).abs() <= 2.5e-3,
                "{x:?}: {p:?} vs {:?}",
                best.1
            );
        }
    }

    #[test]
    fn ellipsoid_projection_satisfies_kkt() {
        let s = spd2();
        let x = [3.0, -2.0];
        let z = project_ellipsoid(&x, &s, 0.5);
        // x - z must be parallel to the outward normal S^{-1} z
        let normal = s.solve(&z);
        let r = [x[0] - z[0], x[1] - z[1]];
        let cross = r[0] * normal[1] - r[1] * normal[0];
        assert!(cross.abs() < 1e-10, "cross {cross}");
        assert!(dot(&r, &normal) > 0.0);
        assert!((s.inv_quad_form(&z).sqrt() - 0.5).abs() < 1e-12);
    }

    fn vec2() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 2)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn norm_axioms(z in vec2(), y in vec2(), c in -5.0f64..5.0) {
            for b in balls() {
                let nz = b.norm(&z).unwrap();
                prop_assert!(nz >= 0.0);
                if z.iter().any(|&v| v != 0.0) { prop_assert!(nz > 0.0); }
                let cz: Vec<f64> = z.iter().map(|v| c * v).collect();
                prop_assert!((b.norm(&cz).unwrap() - c.abs() * nz).abs() <= 1e-12 * (1.0 + nz * c.abs()));
                let s: Vec<f64> = z.iter().zip(&y).map(|(a, b)| a + b).collect();
                prop_assert!(b.norm(&s).unwrap() <= nz + b.norm(&y).unwrap() + 1e-12);
            }
        }

        #[test]
        fn duality_and_support(w in vec2(), z in vec2(), beta in 0.0f64..4.0) {
            for b in balls() {
                let dn = b.dual_norm(&w).unwrap();
                prop_assert!(dot(&w, &z) <= dn * b.norm(&z).unwrap() + 1e-12 * (1.0 + dn));
                let sp = b.support_point(&w, beta).unwrap();
                prop_assert!(b.norm(&sp).unwrap() <= beta * (1.0 + 1e-12) + 1e-300);
                let attained = dot(&w, &sp);
                prop_assert!((attained - beta * dn).abs() <= 1e-12 * (1.0 + beta * dn));
            }
        }

        #[test]
        fn projection_feasible_and_idempotent(x in vec2(), beta in 0.01f64..4.0) {
            for b in balls() {
                let p = b.project(&x, beta).unwrap();
                prop_assert!(b.norm(&p).unwrap() <= beta * (1.0 + 1e-12));
                let q = b.project(&p, beta).unwrap();
                for (a, c) in p.iter().zip(&q) {
                    prop_assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()));
                }
            }
        }
    }
}
