//! Ready-made mappings and families used by the shipped scenarios, tests and
//! benchmarks.

use crate::error::Result;
use crate::iteration::{IterationConfig, WeightSchedule};
use crate::mappings::{FamilyMember, MapKind, MappingSpec};
use crate::params::{ParameterSequences, PhiSpec, SequenceRule};
use crate::spaces::{DomainSpec, Point};

/// Common fixed point of the two `R^4` contractions.
pub const FOUR_DIM_FIXED_POINT: [f64; 4] = [0.3, -0.2, 0.5, 0.1];

/// Linear parts of the two contractions. Every absolute row sum is below 1, so
/// each map sends the sup-norm box around `p` into itself; row and column sums
/// both stay `<= 1`, which caps the spectral norm below 1.
pub const FOUR_DIM_MATRICES: [[[f64; 4]; 4]; 2] = [
    [
        [0.5, 0.2, 0.0, 0.0],
        [0.1, 0.6, 0.1, 0.0],
        [0.0, 0.2, 0.4, 0.1],
        [0.1, 0.0, 0.2, 0.5],
    ],
    [
        [0.3, -0.3, 0.1, 0.0],
        [0.0, 0.2, 0.4, -0.2],
        [0.2, 0.0, 0.5, 0.1],
        [-0.1, 0.3, 0.0, 0.4],
    ],
];

/// Starting point offset from `p`.
pub const FOUR_DIM_START_OFFSET: [f64; 4] = [0.9, -0.8, 0.7, -0.95];

pub fn four_dim_box() -> DomainSpec {
    DomainSpec::Box {
        lo: FOUR_DIM_FIXED_POINT.iter().map(|c| c - 1.0).collect(),
        hi: FOUR_DIM_FIXED_POINT.iter().map(|c| c + 1.0).collect(),
    }
}

pub fn four_dim_contractions() -> Result<Vec<MappingSpec>> {
    let p = Point::new(FOUR_DIM_FIXED_POINT.to_vec())?;
    FOUR_DIM_MATRICES
        .iter()
        .map(|a| {
            let rows = a.iter().map(|r| r.to_vec()).collect();
            MappingSpec::affine_about(rows, &p, four_dim_box())
        })
        .collect()
}

/// Two affine contractions of a box in `R^4` sharing one fixed point,
/// default weights.
pub fn two_contractions_config(max_iters: usize, residual_tol: f64) -> Result<IterationConfig> {
    let p = Point::new(FOUR_DIM_FIXED_POINT.to_vec())?;
    let x1 = Point::new(
        FOUR_DIM_FIXED_POINT
            .iter()
            .zip(FOUR_DIM_START_OFFSET)
            .map(|(a, b)| a + b)
            .collect(),
    )?;
    let family = four_dim_contractions()?
        .into_iter()
        .map(|m| FamilyMember::new(m, ParameterSequences::nonexpansive()))
        .collect::<Result<_>>()?;
    IterationConfig::new(
        family,
        WeightSchedule::default(),
        x1,
        max_iters,
        residual_tol,
        Some(p),
    )
}

/// The step map paired with the identity on `[0, 1]`; common fixed point 1/2.
///
/// `step_params` are the sequences declared for the step map.
pub fn step_and_identity_config(
    step_params: ParameterSequences,
    x1: f64,
    max_iters: usize,
    residual_tol: f64,
) -> Result<IterationConfig> {
    let family = vec![
        FamilyMember::new(MappingSpec::sahu_step(), step_params)?,
        FamilyMember::new(
            MappingSpec::identity(DomainSpec::unit_interval())?,
            ParameterSequences::nonexpansive(),
        )?,
    ];
    IterationConfig::new(
        family,
        WeightSchedule::default(),
        Point::scalar(x1)?,
        max_iters,
        residual_tol,
        Some(Point::scalar(0.5)?),
    )
}

/// Sequences for the step map: `mu_n = 0`, `l_n = a_n = 2^-n`, so
/// `a_1 = 1/2`.
pub fn step_map_params() -> ParameterSequences {
    ParameterSequences::new(
        SequenceRule::Zero,
        SequenceRule::geometric(1.0, 0.5),
        PhiSpec::identity(),
    )
    .with_a(SequenceRule::geometric(1.0, 0.5))
}

/// `mu_n = l_n = 2^-n` with `phi = id`.
pub fn geometric_params() -> ParameterSequences {
    ParameterSequences::new(
        SequenceRule::geometric(1.0, 0.5),
        SequenceRule::geometric(1.0, 0.5),
        PhiSpec::identity(),
    )
    .with_a(SequenceRule::geometric(1.0, 0.5))
}

/// `(x, y) -> (1.5 y, 0)` on `[0, 1] x [0, 1/2]`: expands once, then vanishes.
/// Asymptotically nonexpansive with `mu_1 = 1/2`, `mu_n = 0` for `n >= 2`.
pub fn nilpotent_shear() -> Result<(MappingSpec, SequenceRule)> {
    let map = MappingSpec::new(
        MapKind::Affine {
            matrix: vec![vec![0.0, 1.5], vec![0.0, 0.0]],
            offset: vec![0.0, 0.0],
        },
        DomainSpec::Box {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 0.5],
        },
        vec![Point::new(vec![0.0, 0.0])?],
    )?;
    Ok((map, SequenceRule::FinitelySupported { values: vec![0.5] }))
}

/// Mappings with a bounded domain and their asymptotic factors `mu_n`.
pub fn asymptotically_nonexpansive_examples() -> Result<Vec<(String, MappingSpec, SequenceRule)>> {
    let mut out = Vec::new();
    for (i, m) in four_dim_contractions()?.into_iter().enumerate() {
        out.push((format!("contraction_{}", i + 1), m, SequenceRule::Zero));
    }
    out.push((
        "identity".into(),
        MappingSpec::identity(DomainSpec::unit_interval())?,
        SequenceRule::Zero,
    ));
    out.push((
        "half_scale".into(),
        MappingSpec::scale(0.5, DomainSpec::interval(-1.0, 1.0))?,
        SequenceRule::Zero,
    ));
    let (shear, mu) = nilpotent_shear()?;
    out.push(("nilpotent_shear".into(), shear, mu));
    Ok(out)
}
