//! Complex effective interaction fitted to the single-site truncated
//! steady state.

use super::{ComplexInteraction, Placement};
use crate::error::{Error, Result};
use crate::lattice::{DriveSpec, LatticeModel, Medium};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Closed-form `<b>` of the five-moment single-qubit system, as `(S_x, S_y)`.
pub fn direct_s01(delta: f64, gamma: f64, omega: f64, u: f64) -> (f64, f64) {
    let du = delta + 2.0 * u;
    let w2 = omega * omega;
    let den = du * du * (gamma * gamma + delta * delta)
        + 4.0 * du * u * w2
        + 12.0 * u * w2 * delta
        + 9.0 * gamma.powi(4)
        + 9.0 * gamma * gamma * delta * delta;
    let sx = -omega * (du * du * delta + 12.0 * u * w2 + 9.0 * gamma * gamma * delta) / den;
    let sy = -gamma * omega * (du * du + 9.0 * gamma * gamma) / den;
    (sx, sy)
}

/// `U_eff` for a single directly driven qubit with detuning `delta` and total
/// damping `gamma`.
pub fn ueff_direct(delta: f64, gamma: f64, omega_l: f64, u: f64) -> Result<ComplexInteraction> {
    if gamma <= 0.0 {
        return Err(Error::InvalidArgument("U_eff needs positive damping".into()));
    }
    let (sx, sy) = direct_s01(delta, gamma, omega_l, u);
    if sy == 0.0 || !sy.is_finite() {
        return Err(Error::InvalidArgument(
            "U_eff is undefined at zero drive; use the real interaction".into(),
        ));
    }
    let mag2 = -sy * omega_l / gamma;
    let s = C64::new(sx, sy);
    let beta = s / s.norm() * mag2.sqrt();
    let u_eff = (-omega_l + beta * C64::new(-delta, gamma)) / (2.0 * mag2 * beta);
    Ok(ComplexInteraction {
        u_eff,
        placement: Placement::Homogeneous,
    })
}

/// Steady `<b>` of the seven-moment single-pair system as `E1 + E2 <b^dag b>`.
pub fn side_e12(dq: f64, a: C64, g: f64, omega: f64, u: f64) -> (C64, C64) {
    let ac = a.conj();
    let aa = a * ac;
    let g2 = g * g;
    let p = I * dq * aa + 2.0 * g2 * ac + g2 * a + 2.0 * I * u * aa;
    let q = I * dq * a + g2 + I * u * a;
    let r = I * dq * a + g2;
    let den = r * p * q + 2.0 * I * u * g2 * omega * omega * a * a;
    let e1 = -g * omega * p * q / den;
    let e2 = 4.0 * I * u * g * omega * aa * q / den;
    (e1, e2)
}

/// `U_eff` for one resonator-qubit pair with `A = i dr + gamma`.
pub fn ueff_side(dq: f64, dr: f64, gamma: f64, g: f64, omega_l: f64, u: f64) -> Result<ComplexInteraction> {
    if gamma <= 0.0 || g <= 0.0 || omega_l <= 0.0 {
        return Err(Error::InvalidArgument(
            "side-coupled U_eff needs positive damping, coupling and drive".into(),
        ));
    }
    let a = C64::new(gamma, dr);
    let (e1, e2) = side_e12(dq, a, g, omega_l, u);
    let ac = a.conj();
    let s11 = -omega_l * (ac * e1.conj() + a * e1) / (g * (a + ac) + omega_l * (a * e2 + ac * e2.conj()));
    let s01 = e1 + e2 * s11;
    if s01.norm() < 1e-150 {
        return Err(Error::Numerical("qubit amplitude underflows; use the real interaction".into()));
    }
    let f01 = -I * omega_l / a - I * g / a * s01;
    let u_eff = -(dq * s01 + g * f01) / (2.0 * s01.norm_sqr() * s01);
    Ok(ComplexInteraction {
        u_eff,
        placement: Placement::Homogeneous,
    })
}

/// `U_eff` from the single-site problem built on site `site` of `model`,
/// always with the full two-bath damping. Returns the real interaction at
/// zero drive or zero coupling.
pub fn ueff_for_site(model: &LatticeModel, drive: &DriveSpec, site: usize) -> Result<C64> {
    let u = model.onsite_u();
    if drive.omega_l == 0.0 {
        return Ok(C64::new(u, 0.0));
    }
    let det = model.detunings(drive.omega_p);
    let gamma = model.gamma_total();
    let ci = match model.medium() {
        Medium::Direct => ueff_direct(det.dq[site], gamma, drive.omega_l, u)?,
        Medium::SideCoupled => {
            let g = model.qr_coupling()[site];
            if g == 0.0 {
                return Ok(C64::new(u, 0.0));
            }
            ueff_side(det.dq[site], det.dr[site], gamma, g, drive.omega_l, u)?
        }
    };
    Ok(ci.u_eff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_small;

    #[test]
    fn noninteracting_limit() {
        let (d, g, w) = (0.03, 0.04, 1e-3);
        let (sx, sy) = direct_s01(d, g, w, 0.0);
        let den = d * d + g * g;
        assert!((sx + w * d / den).abs() < 1e-15);
        assert!((sy + w * g / den).abs() < 1e-15);
        let ue = ueff_direct(d, g, w, 0.0).unwrap().u_eff;
        assert!(ue.norm() < 1e-9, "{ue}");
    }

    #[test]
    fn weak_drive_resonant_limit() {
        let (g, w) = (0.04, 1e-7);
        let (_, sy) = direct_s01(0.0, g, w, 1.05);
        assert!((sy + w / g).abs() / (w / g) < 1e-9);
    }

    #[test]
    fn zero_drive_rejected() {
        assert!(ueff_direct(0.0, 0.04, 0.0, 1.05).is_err());
        assert!(ueff_side(0.0, 0.0, 0.04, 0.02, 0.0, 1.05).is_err());
    }

    #[test]
    fn direct_closed_form_matches_five_moment_solve() {
        for &(d, u, w) in &[(0.0, 1.05, 0.02), (-0.05, 1.05, 0.01), (0.07, 0.4, 0.1)] {
            let g = 0.04;
            // unknowns: S01, S10, S11, S12, S21
            let z = vec![
                vec![C64::new(-g, -d), C64::default(), C64::default(), -2.0 * I * u, C64::default()],
                vec![C64::default(), C64::new(-g, d), C64::default(), C64::default(), 2.0 * I * u],
                vec![I * w, -I * w, C64::new(-2.0 * g, 0.0), C64::default(), C64::default()],
                vec![C64::default(), C64::default(), -2.0 * I * w, C64::new(-3.0 * g, -d - 2.0 * u), C64::default()],
                vec![C64::default(), C64::default(), 2.0 * I * w, C64::default(), C64::new(-3.0 * g, d + 2.0 * u)],
            ];
            let rhs = vec![I * w, -I * w, C64::default(), C64::default(), C64::default()];
            let s = solve_small(&z, &rhs).unwrap();
            let (sx, sy) = direct_s01(d, g, w, u);
            assert!((s[0] - C64::new(sx, sy)).norm() < 1e-12 * s[0].norm().max(1e-3));
        }
    }

    #[test]
    fn side_noninteracting_limit() {
        let (e1, e2) = side_e12(0.01, C64::new(0.04, 0.02), 0.02, 1e-3, 0.0);
        assert_eq!(e2, C64::default());
        assert!(e1.norm() > 0.0);
        let ue = ueff_side(0.01, 0.02, 0.04, 0.02, 1e-3, 0.0).unwrap().u_eff;
        assert!(ue.norm() < 1e-9, "{ue}");
    }

    #[test]
    fn physical_loss_sign() {
        let ue = ueff_direct(0.0, 0.04, 0.02, 1.05).unwrap();
        assert!(ue.is_lossy(), "{:?}", ue);
        let us = ueff_side(0.0, 0.0, 0.04, 0.02, 0.02, 1.05).unwrap();
        assert!(us.is_lossy(), "{:?}", us);
    }
}
