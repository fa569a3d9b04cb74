//! Fixed points, the 2-cycle, and the local geometry around them.

use super::{CaseTag, MapError, MapParams};
use crate::field::{Disc, ExactElement, Radius, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LocalType {
    Attracting,
    Indifferent,
    Repelling,
}

impl LocalType {
    pub fn from_multiplier_norm(q: &Radius) -> Self {
        match q.cmp(&Radius::one()) {
            std::cmp::Ordering::Less => LocalType::Attracting,
            std::cmp::Ordering::Equal => LocalType::Indifferent,
            std::cmp::Ordering::Greater => LocalType::Repelling,
        }
    }
}

/// A fixed point `x_i` with the data that drives distances to it.
///
/// For `γ = x - x_i` the map satisfies
/// `f(x_i + γ) - x_i = γ(γ + A)/(c(γ + B))` with `A = (2-c)x_i + a` and
/// `B = x_i + d/c`; `|A|` and `|B|` are the zero and pole radii.
#[derive(Clone, Debug)]
pub struct FixedPointInfo {
    pub point: ExactElement,
    pub multiplier: ExactElement,
    pub multiplier_norm: Radius,
    pub local_type: LocalType,
    pub zero_offset: ExactElement,
    pub pole_offset: ExactElement,
    pub zero_radius: Radius,
    pub pole_radius: Radius,
}

#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub case: CaseTag,
    pub points: Vec<FixedPointInfo>,
    /// `(a-d)² + 4(c-1)b` when `c ≠ 1`.
    pub discriminant: Option<BigRational>,
    /// `c ≠ 1` with a vanishing discriminant: one double fixed point.
    pub parabolic: bool,
}

impl FixedPoints {
    pub fn field_disc(&self) -> Option<&Arc<Disc>> {
        self.points.iter().find_map(|x| x.point.disc())
    }
}

/// The 2-cycle `t₁ ↔ t₂` of the fixed-point-free case.
#[derive(Clone, Debug)]
pub struct TwoCycleInfo {
    pub points: [ExactElement; 2],
    /// `s = t₁ + a`, with `s² = -b/2` and `t₂ + a = -s`.
    pub s: ExactElement,
    /// `h = |s|`, the critical radius.
    pub h: Radius,
    pub multipliers: [ExactElement; 2],
    /// `f'(t₁)·f'(t₂)`, the multiplier of `f∘f` at either point.
    pub cycle_multiplier: ExactElement,
    pub cycle_multiplier_norm: Radius,
    pub local_type: LocalType,
}

/// Zero and pole radii at a fixed point, together with `|c|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalGeometry {
    pub alpha: Radius,
    pub beta: Radius,
    pub c_norm: Radius,
}

/// Star values resolved from a point on a breakpoint sphere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarValues {
    /// `|c|·|f(x) - x_i|` for `x` on the zero-radius sphere.
    pub alpha_star: Option<Radius>,
    /// `|c|·|f(x) - x_i|` for `x` on the pole-radius sphere.
    pub beta_star: Option<Radius>,
}

/// `sup` with a flag saying whether `sup` itself qualifies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadiusBound {
    pub sup: Radius,
    pub inclusive: bool,
}

impl RadiusBound {
    pub fn contains(&self, r: &Radius) -> bool {
        r < &self.sup || (self.inclusive && r == &self.sup)
    }
}

/// Largest balls on which the power series of `f` at a fixed point is
/// contracting (attracting points) or an isometry (indifferent points).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalRadiusBounds {
    pub attracting: Option<RadiusBound>,
    pub indifferent: Option<RadiusBound>,
}

/// One step of the deviation recursion `γ' = γ(γ + A)/(C(γ + B))` measured
/// from `anchors[from]` to `anchors[to]`.
#[derive(Clone, Debug)]
pub struct Deviation {
    pub from: usize,
    pub to: usize,
    pub zero_offset: ExactElement,
    pub pole_offset: ExactElement,
    pub scale: ExactElement,
}

impl Deviation {
    pub fn apply<S: Scalar>(&self, gamma: &S, k: &DeviationConsts<S>) -> Result<S, MapError> {
        let den = k.scale.mul(&gamma.add(&k.pole_offset)?)?;
        if den.is_zero()? {
            return Err(MapError::PoleHit { pole: "pole".into() });
        }
        Ok(gamma.mul(&gamma.add(&k.zero_offset)?)?.div(&den)?)
    }

    pub fn embed<S: Scalar>(&self, p: crate::field::Prime, rel: u32) -> Result<DeviationConsts<S>, MapError> {
        Ok(DeviationConsts {
            zero_offset: S::embed(&self.zero_offset, p, rel)?,
            pole_offset: S::embed(&self.pole_offset, p, rel)?,
            scale: S::embed(&self.scale, p, rel)?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct DeviationConsts<S> {
    pub zero_offset: S,
    pub pole_offset: S,
    pub scale: S,
}

fn rat(x: &BigRational) -> ExactElement {
    ExactElement::rational(x.clone())
}

impl MapParams {
    /// Fixed points with multipliers and local radii. `NoFixed` and `Identity`
    /// have no isolated fixed points and return an empty list.
    pub fn fixed_points(&self) -> Result<FixedPoints, MapError> {
        let case = self.case();
        let mut out = FixedPoints { case, points: Vec::new(), discriminant: None, parabolic: false };
        match case {
            CaseTag::Identity | CaseTag::NoFixed => {}
            CaseTag::UniqueFixed => {
                let x0 = rat(&(self.b() / (self.d() - self.a())));
                let info = self.fixed_info(x0)?;
                let closed = rat(&self.unique_fixed_multiplier()?);
                assert_eq!(closed, info.multiplier, "closed-form multiplier disagrees with f'");
                out.points.push(info);
            }
            CaseTag::TwoFixed => {
                let amd = self.a() - self.d();
                let cm1 = self.c() - BigRational::one();
                let delta = &amd * &amd + BigRational::from(BigInt::from(4)) * &cm1 * self.b();
                let den = BigRational::from(BigInt::from(2)) * &cm1;
                let centre = &amd / &den;
                if delta.is_zero() {
                    out.parabolic = true;
                    out.points.push(self.fixed_info(rat(&centre))?);
                } else {
                    let step = BigRational::one() / &den;
                    for sign in [1, -1] {
                        let im = &step * BigRational::from(BigInt::from(sign));
                        let x = ExactElement::with_sqrt(centre.clone(), im, &delta)?;
                        out.points.push(self.fixed_info(x)?);
                    }
                }
                out.discriminant = Some(delta);
            }
        }
        Ok(out)
    }

    fn fixed_info(&self, x: ExactElement) -> Result<FixedPointInfo, MapError> {
        assert_eq!(self.eval(&x)?, x, "computed fixed point is not fixed");
        let p = self.p();
        let multiplier = self.derivative(&x, 1)?;
        let multiplier_norm = multiplier.norm(p);
        let two_minus_c = rat(&(BigRational::from(BigInt::from(2)) - self.c()));
        let zero_offset = &(&two_minus_c * &x) + &rat(self.a());
        let pole_offset = &x + &rat(&(self.d() / self.c()));
        Ok(FixedPointInfo {
            local_type: LocalType::from_multiplier_norm(&multiplier_norm),
            zero_radius: zero_offset.norm(p),
            pole_radius: pole_offset.norm(p),
            point: x,
            multiplier,
            multiplier_norm,
            zero_offset,
            pole_offset,
        })
    }

    /// The 2-cycle `t_{1,2} = -a ± √(-b/2)` of the `NoFixed` case.
    pub fn two_cycle(&self) -> Result<TwoCycleInfo, MapError> {
        self.expect_case(CaseTag::NoFixed)?;
        let p = self.p();
        let half = -self.b() / BigRational::from(BigInt::from(2));
        let s = ExactElement::with_sqrt(BigRational::zero(), BigRational::one(), &half)?;
        let a = rat(self.a());
        let t1 = &s - &a;
        let t2 = &(-&s) - &a;
        assert_eq!(self.eval(&t1)?, t2, "f(t1) != t2");
        assert_eq!(self.eval(&t2)?, t1, "f(t2) != t1");
        let m1 = self.derivative(&t1, 1)?;
        let m2 = self.derivative(&t2, 1)?;
        let cycle_multiplier = &m1 * &m2;
        let cycle_multiplier_norm = cycle_multiplier.norm(p);
        Ok(TwoCycleInfo {
            h: s.norm(p),
            local_type: LocalType::from_multiplier_norm(&cycle_multiplier_norm),
            points: [t1, t2],
            s,
            multipliers: [m1, m2],
            cycle_multiplier,
            cycle_multiplier_norm,
        })
    }

    /// Anchors (fixed points or cycle points) with the deviation step out of each.
    pub fn deviations(&self) -> Result<(Vec<ExactElement>, Vec<Deviation>), MapError> {
        match self.case() {
            CaseTag::UniqueFixed | CaseTag::TwoFixed => {
                let fps = self.fixed_points()?;
                let c = rat(self.c());
                let anchors = fps.points.iter().map(|f| f.point.clone()).collect();
                let devs = fps
                    .points
                    .iter()
                    .enumerate()
                    .map(|(i, f)| Deviation {
                        from: i,
                        to: i,
                        zero_offset: f.zero_offset.clone(),
                        pole_offset: f.pole_offset.clone(),
                        scale: c.clone(),
                    })
                    .collect();
                Ok((anchors, devs))
            }
            CaseTag::NoFixed => {
                let cyc = self.two_cycle()?;
                let three = ExactElement::from_int(3);
                let mut devs = Vec::new();
                for (k, s) in [cyc.s.clone(), -&cyc.s].into_iter().enumerate() {
                    devs.push(Deviation {
                        from: k,
                        to: 1 - k,
                        zero_offset: &three * &s,
                        pole_offset: s.clone(),
                        scale: ExactElement::from_int(1).in_field(s.disc())?,
                    });
                }
                Ok((cyc.points.to_vec(), devs))
            }
            CaseTag::Identity => Ok((Vec::new(), Vec::new())),
        }
    }

    fn fixed_point(&self, i: usize) -> Result<FixedPointInfo, MapError> {
        self.fixed_points()?.points.get(i).cloned().ok_or(MapError::NoSuchFixedPoint(i))
    }

    /// Zero radius `α_i`, pole radius `β_i` and `|c|` at fixed point `i`.
    pub fn local_geometry(&self, i: usize) -> Result<LocalGeometry, MapError> {
        let fp = self.fixed_point(i)?;
        Ok(LocalGeometry { alpha: fp.zero_radius, beta: fp.pole_radius, c_norm: self.c_norm() })
    }

    /// Star values read off a point `x` on one of the breakpoint spheres of fixed point `i`.
    pub fn star_values(&self, i: usize, x: &ExactElement) -> Result<StarValues, MapError> {
        let fp = self.fixed_point(i)?;
        let p = self.p();
        let gamma = x.try_sub(&fp.point).map_err(|_| MapError::NeedsTower)?;
        let r = gamma.norm(p);
        let on_alpha = r == fp.zero_radius;
        let on_beta = r == fp.pole_radius;
        if !on_alpha && !on_beta {
            return Err(MapError::NotOnBreakpointSphere);
        }
        let pole_side = (&gamma + &fp.pole_offset).norm(p);
        if pole_side.is_zero() {
            return Err(MapError::PoleHit { pole: crate::field::rational::format_rational(&self.pole()) });
        }
        let star = &(&r * &(&gamma + &fp.zero_offset).norm(p)) / &pole_side;
        Ok(StarValues {
            alpha_star: on_alpha.then(|| star.clone()),
            beta_star: on_beta.then_some(star),
        })
    }

    /// Both sides of `|f(x) - x_i| = |γ||γ + A| / (|c||γ + B|)` for `γ = x - x_i`.
    pub fn distance_identity(&self, i: usize, x: &ExactElement) -> Result<(Radius, Radius), MapError> {
        let fp = self.fixed_point(i)?;
        let p = self.p();
        let gamma = x.try_sub(&fp.point).map_err(|_| MapError::NeedsTower)?;
        let lhs = self.eval(x)?.try_sub(&fp.point)?.norm(p);
        let num = &gamma.norm(p) * &(&gamma + &fp.zero_offset).norm(p);
        let den = &self.c_norm() * &(&gamma + &fp.pole_offset).norm(p);
        Ok((lhs, &num / &den))
    }
}

/// Radii on which the local power series at fixed point `info` is contracting
/// or isometric.
///
/// With `β = |x₀ + d/c|` and `M = |K/(c³β²)|` the higher Taylor terms satisfy
/// `|f⁽ⁿ⁾(x₀)/n!|·rⁿ⁻¹ = M·(r/β)ⁿ⁻¹`, so the supremum over `n ≥ 2` is `M·r/β`
/// for `r < β`, `M` at `r = β` and infinite beyond. Both conditions reduce to
/// that supremum being below 1.
pub fn local_radius_bounds(params: &MapParams, info: &FixedPointInfo) -> LocalRadiusBounds {
    let p = params.p();
    let k = rat(&params.residue_numerator());
    let c3 = rat(&(params.c() * params.c() * params.c()));
    let beta = info.pole_radius.clone();
    let m = &(&k.norm(p) / &c3.norm(p)) / &beta.square();
    let bound = if m < Radius::one() {
        RadiusBound { sup: beta, inclusive: true }
    } else {
        RadiusBound { sup: &beta / &m, inclusive: false }
    };
    match info.local_type {
        LocalType::Attracting => LocalRadiusBounds { attracting: Some(bound), indifferent: None },
        LocalType::Indifferent => LocalRadiusBounds { attracting: None, indifferent: Some(bound) },
        LocalType::Repelling => LocalRadiusBounds { attracting: None, indifferent: None },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_rational;

    fn m(p: u64, a: &str, b: &str, c: &str, d: &str) -> MapParams {
        MapParams::parse(p, a, b, c, d).unwrap()
    }
    fn e(s: &str) -> ExactElement {
        ExactElement::parse(s).unwrap()
    }

    #[test]
    fn unique_fixed_point_geometry() {
        let f = m(3, "0", "2", "1", "1");
        let fps = f.fixed_points().unwrap();
        assert_eq!(fps.points.len(), 1);
        let x0 = &fps.points[0];
        assert_eq!(x0.point, e("2"));
        assert_eq!(x0.multiplier, e("2/3"));
        assert_eq!(x0.multiplier_norm, Radius::exp(1));
        assert_eq!(x0.local_type, LocalType::Repelling);
        assert_eq!(x0.pole_radius, Radius::exp(-1));
        // |A| = q·δ
        assert_eq!(x0.zero_radius, &x0.multiplier_norm * &x0.pole_radius);
    }

    #[test]
    fn two_fixed_points_example() {
        let f = m(3, "0", "0", "2", "1");
        let fps = f.fixed_points().unwrap();
        let pts: Vec<_> = fps.points.iter().map(|x| x.point.clone()).collect();
        assert!(pts.contains(&e("0")) && pts.contains(&e("-1")));
        let i0 = pts.iter().position(|x| *x == e("0")).unwrap();
        let g = f.local_geometry(i0).unwrap();
        assert_eq!(g.alpha, Radius::Zero);
        assert_eq!(g.beta, Radius::one());
        assert_eq!(g.c_norm, Radius::one());
        assert_eq!(fps.points[i0].multiplier, e("0"));
    }

    #[test]
    fn irrational_fixed_points() {
        // Δ = (a-d)² + 4(c-1)b = 1 + 8 = 9 → rational; pick b = 1, c = 3, a = d = 0 → Δ = 8
        let f = m(7, "0", "1", "3", "0");
        let fps = f.fixed_points().unwrap();
        assert_eq!(fps.discriminant, Some(parse_rational("8").unwrap()));
        assert_eq!(fps.points.len(), 2);
        for fp in &fps.points {
            assert!(!fp.point.is_rational());
            assert_eq!(f.eval(&fp.point).unwrap(), fp.point);
        }
    }

    #[test]
    fn parabolic_fixed_point() {
        // c = 2, a - d = 2, b = -1: Δ = 4 - 4 = 0
        let f = m(5, "2", "-1", "2", "0");
        let fps = f.fixed_points().unwrap();
        assert!(fps.parabolic);
        assert_eq!(fps.points.len(), 1);
        assert_eq!(fps.points[0].multiplier, e("1"));
    }

    #[test]
    fn two_cycle_multipliers() {
        for (p, a, b) in [(3u64, "0", "-2"), (3, "1", "2"), (5, "1/2", "-8"), (7, "-3", "5/2")] {
            let f = m(p, a, b, "1", a);
            let cyc = f.two_cycle().unwrap();
            assert_eq!(cyc.multipliers[0], e("3"));
            assert_eq!(cyc.multipliers[1], e("3"));
            assert_eq!(cyc.cycle_multiplier, e("9"));
        }
        let f = m(3, "0", "-2", "1", "0");
        let cyc = f.two_cycle().unwrap();
        assert_eq!(cyc.points, [e("1"), e("-1")]);
        assert_eq!(cyc.h, Radius::one());
        assert_eq!(cyc.cycle_multiplier_norm, Radius::exp(-2));
        assert_eq!(cyc.local_type, LocalType::Attracting);
        assert!(matches!(m(3, "0", "2", "1", "1").two_cycle(), Err(MapError::WrongCase { .. })));
    }

    #[test]
    fn deviation_steps_match_the_map() {
        for f in [m(3, "0", "2", "1", "1"), m(3, "0", "0", "2", "1"), m(5, "1", "3", "4", "-2"), m(3, "0", "-2", "1", "0")] {
            let (anchors, devs) = f.deviations().unwrap();
            for dev in &devs {
                for g in ["1/3", "5", "-2/7", "9/2"] {
                    let gamma = e(g).in_field(anchors[0].disc()).unwrap();
                    let x = &anchors[dev.from] + &gamma;
                    let Ok(fx) = f.eval(&x) else { continue };
                    let k = dev.embed::<ExactElement>(f.p(), 0).unwrap();
                    let next = dev.apply(&gamma, &k).unwrap();
                    assert_eq!(&fx - &anchors[dev.to], next, "{f} gamma={g}");
                }
            }
        }
    }

    #[test]
    fn zero_offset_closed_forms() {
        // (2-c)x + a = (c x² + 2d x + ad - bc)/(c x + d) at fixed points
        for f in [m(3, "0", "0", "2", "1"), m(5, "1", "3", "4", "-2"), m(7, "2", "-1", "1", "5")] {
            for fp in f.fixed_points().unwrap().points {
                let x = &fp.point;
                let r = |v: &BigRational| ExactElement::rational(v.clone());
                let num = &(&(&r(f.c()) * &(x * x)) + &(&(&e("2") * &r(f.d())) * x)) + &r(&(f.a() * f.d() - f.b() * f.c()));
                let den = &(&r(f.c()) * x) + &r(f.d());
                assert_eq!(num.try_div(&den).unwrap(), fp.zero_offset);
            }
        }
        // c = 1: x₀² + 2d x₀ + ad - b = (x₀ + a)(x₀ + d)
        let f = m(3, "0", "2", "1", "1");
        let x0 = e("2");
        let lhs = &(&(&x0 * &x0) + &(&e("2") * &x0)) + &e("-2");
        assert_eq!(lhs, &(&x0 + &e("0")) * &(&x0 + &e("1")));
        let _ = f;
    }

    #[test]
    fn star_values_on_breakpoints() {
        let f = m(3, "0", "2", "1", "1");
        // x₀ = 2, β = |3| = 1/3, α = |2| = 1. x = 2 + 1 lies on the α sphere
        let s = f.star_values(0, &e("3")).unwrap();
        assert!(s.alpha_star.is_some() && s.beta_star.is_none());
        let (lhs, rhs) = f.distance_identity(0, &e("3")).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(f.star_values(0, &e("7/3")), Err(MapError::NotOnBreakpointSphere));
    }

    #[test]
    fn radius_bounds() {
        // indifferent: x₀ = 2 at p = 5, every r < δ = 1
        let f = m(5, "0", "2", "1", "1");
        let fp = &f.fixed_points().unwrap().points[0];
        let b = local_radius_bounds(&f, fp);
        assert_eq!(b.indifferent, Some(RadiusBound { sup: Radius::one(), inclusive: false }));
        assert!(b.attracting.is_none());
        // superattracting: multiplier 0 gives only the attracting bound
        let g = m(3, "0", "0", "2", "1");
        let fps = g.fixed_points().unwrap();
        let z = fps.points.iter().find(|x| x.point == e("0")).unwrap();
        let b = local_radius_bounds(&g, z);
        assert!(b.attracting.is_some() && b.indifferent.is_none());
    }
}
