//! Seeded random parameter sets shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triheun::validation::SERIES_REACH;
use triheun::{classify, CanonicalParams, CaseTag, CoordinateMap, HeunSixParams};

pub const ALL_TAGS: [CaseTag; 9] = [
    CaseTag::DeltaNegB2Pos,
    CaseTag::DeltaZeroB1Pos,
    CaseTag::DeltaZeroB1Neg,
    CaseTag::DeltaZeroB0B1Zero,
    CaseTag::DeltaPosB2Pos,
    CaseTag::DeltaPosB2Neg,
    CaseTag::LinearB2Zero,
    CaseTag::LinearB0B2Zero,
    CaseTag::ConstantB1B2Zero,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw_b(tag: CaseTag, rng: &mut impl Rng) -> [f64; 3] {
    let mut u = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    match tag {
        CaseTag::DeltaNegB2Pos => {
            let (b0, b2) = (u(0.3, 2.0), u(0.3, 2.0));
            let b1 = u(-0.9, 0.9) * 2.0 * (b0 * b2).sqrt();
            [b0, b1, b2]
        }
        CaseTag::DeltaZeroB1Pos => {
            let (b0, b2) = (u(0.3, 2.0), u(0.3, 2.0));
            [b0, 2.0 * (b0 * b2).sqrt(), b2]
        }
        CaseTag::DeltaZeroB1Neg => {
            let b2 = u(0.3, 2.0);
            let b0 = b2 * u(0.01, 0.5);
            [b0, -2.0 * (b0 * b2).sqrt(), b2]
        }
        CaseTag::DeltaZeroB0B1Zero => [0.0, 0.0, u(0.3, 2.0)],
        CaseTag::DeltaPosB2Pos => [u(-1.0, -0.1), u(-0.5, 1.0), u(0.5, 2.0)],
        CaseTag::DeltaPosB2Neg => [u(0.2, 2.0), u(-1.0, 1.0), u(-2.0, -0.5)],
        CaseTag::LinearB2Zero => [u(-1.0, 1.0), u(0.3, 2.0), 0.0],
        CaseTag::LinearB0B2Zero => [0.0, u(0.3, 2.0), 0.0],
        CaseTag::ConstantB1B2Zero => [u(0.3, 2.0), 0.0, 0.0],
    }
}

/// Feasible parameters of the given case, with `a` uniform in `[-1, 1]³` and a ρ-domain
/// that overlaps the series reach by at least 0.5.
pub fn random_params(tag: CaseTag, rng: &mut impl Rng) -> HeunSixParams {
    loop {
        let a = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let b = draw_b(tag, rng);
        let Ok(p) = HeunSixParams::new(a, b) else { continue };
        if classify(&p).ok() != Some(tag) {
            continue;
        }
        let Ok(map) = CoordinateMap::new(p) else { continue };
        let (lo, hi) = map.rho_domain();
        if hi.min(SERIES_REACH) - lo.max(-SERIES_REACH) >= 0.5 {
            return p;
        }
    }
}

pub fn random_canonical(rng: &mut impl Rng, span: f64) -> CanonicalParams {
    CanonicalParams::new(
        rng.gen_range(-span..span),
        rng.gen_range(-span..span),
        rng.gen_range(-span..span),
    )
}
