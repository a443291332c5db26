use super::elimination::ResonatorElimination;
use super::solve::{steady_state, SteadyState};
use super::system::assemble_linear_system;
use crate::algebra::NormalMonomial;
use crate::error::{Error, Result};
use crate::lattice::{drive_from_intensity, DriveSpec, LatticeModel, Medium};
use crate::C64;

/// Intensity used in place of a zero drive, where `T` is defined by its
/// weak-drive limit.
pub const REFERENCE_INTENSITY: f64 = 1e-10;

fn reference_state(model: &LatticeModel, drive: &DriveSpec, m: u32) -> Result<(SteadyState, DriveSpec)> {
    let d = drive_from_intensity(model, drive.omega_p, REFERENCE_INTENSITY)?;
    let ss = steady_state(&assemble_linear_system(model, &d, m)?)?;
    Ok((ss, d))
}

/// `T = 2 Gamma_R <b_N^dag b_N> / I_in` for the direct medium.
pub fn transmission_direct(ss: &SteadyState, model: &LatticeModel, drive: &DriveSpec) -> Result<f64> {
    if model.medium() != Medium::Direct {
        return Err(Error::InvalidArgument("direct transmission needs the direct medium".into()));
    }
    if drive.i_in == 0.0 {
        let (ss, d) = reference_state(model, drive, ss.truncation().m() as u32)?;
        return transmission_direct(&ss, model, &d);
    }
    let n = model.n_sites();
    Ok(2.0 * model.gamma_r() * ss.occupation(n - 1) / drive.i_in)
}

/// `T = 2 Gamma_R <f_N^dag f_N> / I_in` with the output resonator field
/// rebuilt from the qubit moments through the elimination relation.
pub fn transmission_side(
    ss: &SteadyState,
    elim: &ResonatorElimination,
    model: &LatticeModel,
    drive: &DriveSpec,
) -> Result<f64> {
    if model.medium() != Medium::SideCoupled {
        return Err(Error::InvalidArgument("side transmission needs the side-coupled medium".into()));
    }
    if drive.i_in == 0.0 {
        let (ss, d) = reference_state(model, drive, ss.truncation().m() as u32)?;
        let elim = super::elimination::eliminate_resonators(model, &d)?;
        return transmission_side(&ss, &elim, model, &d);
    }
    let n = model.n_sites();
    let last = n - 1;
    let c0 = elim.c0()[last];
    let c = elim.c_row(last);
    let missing = || Error::InvalidArgument("steady state lacks first or second moments; use m >= 1".into());
    let mut ff = C64::new(c0.norm_sqr(), 0.0);
    for (j, &cj) in c.iter().enumerate() {
        if cj == C64::default() {
            continue;
        }
        let b = ss.expectation(&NormalMonomial::annihilation(n, j)).ok_or_else(missing)?;
        let t = c0.conj() * cj * b;
        ff += t + t.conj();
    }
    for j in 0..n {
        for k in 0..n {
            if c[j] == C64::default() || c[k] == C64::default() {
                continue;
            }
            let mut e = vec![(0u8, 0u8); n];
            e[j].0 += 1;
            e[k].1 += 1;
            let bb = ss.expectation(&NormalMonomial::new(e)).ok_or_else(missing)?;
            ff += c[j].conj() * c[k] * bb;
        }
    }
    Ok(2.0 * model.gamma_r() * ff.re / drive.i_in)
}

/// Assembles, solves and evaluates the THLE transmission in one call.
pub fn thle_transmission(model: &LatticeModel, drive: &DriveSpec, m: u32) -> Result<(f64, SteadyState)> {
    let sys = assemble_linear_system(model, drive, m)?;
    let ss = steady_state(&sys)?;
    let t = match sys.elimination() {
        Some(elim) => transmission_side(&ss, elim, model, drive)?,
        None => transmission_direct(&ss, model, drive)?,
    };
    Ok((t, ss))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(gl: f64, gr: f64) -> LatticeModel {
        LatticeModel::direct(vec![1.0], 1.05, 0.0, gl, gr).unwrap()
    }

    #[test]
    fn resonant_weak_drive_is_fully_transmitted() {
        let model = direct(0.02, 0.02);
        let drive = drive_from_intensity(&model, 1.0, 1e-8).unwrap();
        let (t, _) = thle_transmission(&model, &drive, 2).unwrap();
        assert!((t - 1.0).abs() < 1e-3, "{t}");
    }

    #[test]
    fn asymmetric_lorentzian() {
        let (gl, gr) = (0.01, 0.03);
        let model = direct(gl, gr);
        for wp in [0.95, 0.99, 1.0, 1.02] {
            let drive = drive_from_intensity(&model, wp, 1e-8).unwrap();
            let (t, _) = thle_transmission(&model, &drive, 2).unwrap();
            let d: f64 = 1.0 - wp;
            let expected = 4.0 * gl * gr / (d * d + (gl + gr).powi(2));
            assert!((t - expected).abs() < 1e-3, "{wp}: {t} vs {expected}");
        }
    }

    #[test]
    fn zero_drive_uses_the_weak_limit() {
        let model = direct(0.02, 0.02);
        let drive = drive_from_intensity(&model, 1.0, 0.0).unwrap();
        let (t, _) = thle_transmission(&model, &drive, 2).unwrap();
        assert!((t - 1.0).abs() < 1e-3);
    }

    #[test]
    fn side_coupled_resonant_qubit_blocks() {
        let model = LatticeModel::side_coupled(vec![1.0], vec![1.0], vec![0.02], 1.05, 0.0, 0.02, 0.02).unwrap();
        let drive = drive_from_intensity(&model, 1.0, 1e-8).unwrap();
        let (t, _) = thle_transmission(&model, &drive, 2).unwrap();
        assert!(t < 1e-3, "{t}");
    }

    #[test]
    fn uncoupled_resonator_line() {
        let model = LatticeModel::side_coupled(vec![1.0], vec![1.0], vec![0.0], 1.05, 0.0, 0.02, 0.02).unwrap();
        let drive = drive_from_intensity(&model, 1.0, 1e-3).unwrap();
        let (t, _) = thle_transmission(&model, &drive, 1).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
    }
}
