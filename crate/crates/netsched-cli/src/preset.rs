//! Built-in benchmark presets: the linearized batch reactor, the
//! linearized inverted pendulum (sampling time 0.05), and the two-plant
//! reference configuration combining them over a capacity-1 network.
//!
//! All digits are embedded exactly as printed in the reference data,
//! including the published certificate pairs, the feasibility-problem
//! solutions Y_i, and the residual matrices used by the verification
//! fixtures.

use anyhow::{bail, Result};
use nalgebra::DMatrix;

use crate::config::{CertificateEntry, PlantEntry, RunConfig, ScheduleEntry, SolverEntry};

/// A named preset: plant fragments plus, when the preset describes a
/// complete network, capacity and scheduling parameters.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub config: RunConfig,
}

fn rows(m: &[&[f64]]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

/// Batch reactor: 4 states, 2 inputs, reference gain K_1.
fn batch_reactor_entry() -> PlantEntry {
    PlantEntry {
        index: 1,
        a: rows(&[
            &[1.0795, -0.0045, 0.2896, -0.2367],
            &[-0.0272, 0.8101, -0.0032, 0.0323],
            &[0.0447, 0.1886, 0.7317, 0.2354],
            &[0.0010, 0.1888, 0.0545, 0.9115],
        ]),
        b: rows(&[
            &[0.0006, -0.0239],
            &[0.2567, 0.0002],
            &[0.0837, -0.1346],
            &[0.0837, -0.0046],
        ]),
        k: Some(rows(&[
            &[0.0152761, -0.8159748, -0.2394377, -0.7514747],
            &[2.3245781, 0.0798596, 1.622477, -1.0654847],
        ])),
    }
}

/// Inverted pendulum: 2 states, 1 input, reference gain K_2.
fn inverted_pendulum_entry() -> PlantEntry {
    PlantEntry {
        index: 2,
        a: rows(&[&[1.0123, 0.0502], &[0.4920, 1.0123]]),
        b: rows(&[&[0.0123], &[0.4920]]),
        k: Some(rows(&[&[-2.3973087, -1.4308615]])),
    }
}

fn batch_reactor_certificate() -> CertificateEntry {
    CertificateEntry {
        plant: 1,
        p: "1/2".into(),
        kappa: 1e-8,
        p_s: rows(&[
            &[974.82022, 115.25221, 693.51383, -223.88521],
            &[115.25221, 1022.0729, 160.38138, 109.95335],
            &[693.51383, 160.38138, 768.15463, -219.94088],
            &[-223.88521, 109.95335, -219.94088, 1250.1576],
        ]),
        p_u: rows(&[
            &[1678.8234, 300.05968, 1271.4766, -378.75625],
            &[300.05968, 1465.4904, 391.07683, 368.29291],
            &[1271.4766, 391.07683, 1213.8238, -279.44358],
            &[-378.75625, 368.29291, -279.44358, 1483.7789],
        ]),
    }
}

fn inverted_pendulum_certificate() -> CertificateEntry {
    CertificateEntry {
        plant: 2,
        p: "1/2".into(),
        kappa: 1e-8,
        p_s: rows(&[&[1717.7113, 138.39564], &[138.39564, 50.218134]]),
        p_u: rows(&[&[2580.3612, 512.67656], &[512.67656, 184.31981]]),
    }
}

/// Reference data beyond the configuration itself: the published
/// solutions of the gain feasibility problem and the residual matrices
/// of the stability condition, used by verification tests and the
/// `verify` command's reference mode.
#[derive(Debug, Clone)]
pub struct ReferenceData {
    /// Y_1, Y_2: gain feasibility solutions with K_i = Y_i·P_{i,s}.
    pub y: [DMatrix<f64>; 2],
    /// Printed residuals (R_s, R_u) per plant.
    pub residuals: [(DMatrix<f64>, DMatrix<f64>); 2],
}

/// The published Experiment-style reference values.
pub fn reference_data() -> ReferenceData {
    let y1 = DMatrix::from_row_slice(
        2,
        4,
        &[
            0.0005645, -0.0006647, -0.0008519, -0.0005914, //
            0.0024236, -0.0001203, -0.0001764, -0.0004387,
        ],
    );
    let y2 = DMatrix::from_row_slice(1, 2, &[0.0011569, -0.0316812]);
    let r1s = DMatrix::from_row_slice(
        4,
        4,
        &[
            -51.553004, -7.8596573, -69.500984, -13.199701, //
            -7.8596573, -480.12758, -40.530729, 37.248709, //
            -69.500984, -40.530729, -230.28674, 106.35376, //
            -13.199701, 37.248709, 106.35376, -300.5394,
        ],
    );
    let r1u = DMatrix::from_row_slice(
        4,
        4,
        &[
            -48.482389, 0.1252562, -62.165288, -15.778984, //
            0.1252562, -428.29213, -25.838462, 53.124646, //
            -62.165288, -25.838462, -182.71532, 86.522247, //
            -15.778984, 53.124646, 86.522247, -289.02844,
        ],
    );
    let r2s = DMatrix::from_row_slice(2, 2, &[-26.390428, -3.0495068, -3.0495068, -30.242636]);
    let r2u = DMatrix::from_row_slice(2, 2, &[-25.479355, -3.4282391, -3.4282391, -25.646787]);
    ReferenceData {
        y: [y1, y2],
        residuals: [(r1s, r1u), (r2s, r2u)],
    }
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    let (name, config) = match name {
        "batch-reactor" => ("batch-reactor", RunConfig {
            plants: vec![batch_reactor_entry()],
            capacity: 0,
            schedule: None,
            solver: None,
            simulation: None,
            certificates: Some(vec![batch_reactor_certificate()]),
            initial_states: None,
        }),
        "inverted-pendulum" => ("inverted-pendulum", RunConfig {
            plants: vec![inverted_pendulum_entry()],
            capacity: 0,
            schedule: None,
            solver: None,
            simulation: None,
            certificates: Some(vec![inverted_pendulum_certificate()]),
            initial_states: None,
        }),
        "experiment1" => ("experiment1", RunConfig {
            plants: vec![batch_reactor_entry(), inverted_pendulum_entry()],
            capacity: 1,
            schedule: Some(ScheduleEntry {
                partition: vec![vec![1], vec![2]],
                probabilities: vec!["1/2".into(), "1/2".into()],
                h: "1/2".into(),
            }),
            solver: Some(SolverEntry {
                kappa: Some(1e-8),
                h: Some("1/2".into()),
            }),
            simulation: None,
            certificates: Some(vec![
                batch_reactor_certificate(),
                inverted_pendulum_certificate(),
            ]),
            initial_states: None,
        }),
        other => bail!(
            "unknown preset {other:?} (expected batch-reactor, inverted-pendulum, or experiment1)"
        ),
    };
    Ok(Preset { name, config })
}

/// Whether the preset describes a complete network (capacity set) as
/// opposed to a single-plant fragment.
pub fn is_complete(preset: &Preset) -> bool {
    preset.config.capacity > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_matrix;

    #[test]
    fn pendulum_preset_matches_printed_digits() {
        let p = preset("inverted-pendulum").unwrap();
        assert_eq!(
            p.config.plants[0].a,
            vec![vec![1.0123, 0.0502], vec![0.4920, 1.0123]]
        );
    }

    #[test]
    fn reactor_preset_matches_printed_digits() {
        let p = preset("batch-reactor").unwrap();
        let a = parse_matrix(&p.config.plants[0].a, "A").unwrap();
        assert_eq!(a.nrows(), 4);
        assert_eq!(a[(0, 0)], 1.0795);
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(preset("nope").is_err());
    }

    #[test]
    fn experiment_preset_is_a_valid_two_plant_network() {
        let p = preset("experiment1").unwrap();
        assert!(is_complete(&p));
        let ncs = p.config.to_ncs().unwrap();
        assert_eq!(ncs.n(), 2);
        assert_eq!(ncs.capacity, 1);
        let params = p.config.to_params().unwrap().unwrap();
        assert_eq!(params.v(), 2);
        assert_eq!(p.config.to_certificates().unwrap().len(), 2);
    }

    #[test]
    fn fragments_are_not_complete_networks() {
        assert!(!is_complete(&preset("batch-reactor").unwrap()));
        assert!(preset("batch-reactor").unwrap().config.to_ncs().is_err());
    }
}
