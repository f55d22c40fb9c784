//! Deterministic, platform-stable random streams.
//!
//! Sampling must reproduce bit-for-bit from a seed on every platform and
//! under any parallel schedule, so this module uses:
//!
//! - SplitMix64 as the uniform generator. Its output is a pure function of
//!   `seed + (i+1) * GOLDEN`, i.e. counter-based, so any stream position can
//!   be computed independently.
//! - The SplitMix64 finalizer as the avalanche mixer that derives one
//!   independent stream seed per replication from `(master_seed, index)`.
//! - The Wichura AS 241 rational approximation of the inverse normal CDF,
//!   accurate to full double precision. Each normal variate consumes exactly
//!   one 64-bit uniform, keeping stream consumption schedule-independent
//!   (rejection samplers consume a variable count).

// The AS 241 coefficients are kept at their published digit counts.
#![allow(clippy::excessive_precision)]

/// Weyl increment of the SplitMix64 sequence.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective 64-bit avalanche mixer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of replication stream `stream_index` from the master
/// seed: `mix64(master_seed + (stream_index + 1) * GOLDEN)`.
///
/// Distinct indices map to distinct seeds for a fixed master seed because
/// both the Weyl step and the mixer are bijections.
#[inline]
pub fn stream_seed(master_seed: u64, stream_index: u64) -> u64 {
    mix64(master_seed.wrapping_add(stream_index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// SplitMix64 uniform generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform variate in the open interval (0, 1), from the top 53 bits of
    /// one 64-bit output, offset half a grid cell so the endpoints are
    /// never produced.
    #[inline]
    pub fn next_uniform_open(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53
        ((self.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    /// Standard normal variate via the inverse CDF; one uniform per variate.
    #[inline]
    pub fn next_standard_normal(&mut self) -> f64 {
        inverse_normal_cdf(self.next_uniform_open())
    }
}

/// Inverse of the standard normal CDF (Wichura's algorithm AS 241,
/// double-precision branch). Requires `p` in the open interval (0, 1).
///
/// Relative accuracy is about 1e-15 over the full range.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "inverse normal CDF requires p in (0,1), got {p}");

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * rational(r, &CENTRAL_NUM, &CENTRAL_DEN);
    }

    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        rational(r, &MIDDLE_NUM, &MIDDLE_DEN)
    } else {
        r -= 5.0;
        rational(r, &TAIL_NUM, &TAIL_DEN)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

#[inline]
fn rational(r: f64, num: &[f64; 8], den: &[f64; 8]) -> f64 {
    let mut n = num[7];
    let mut d = den[7];
    for i in (0..7).rev() {
        n = n * r + num[i];
        d = d * r + den[i];
    }
    n / d
}

// AS 241 coefficient sets, lowest order first, transcribed verbatim from
// the published routine.
const CENTRAL_NUM: [f64; 8] = [
    3.387_132_872_796_366_608e0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const MIDDLE_NUM: [f64; 8] = [
    1.423_437_110_749_683_577_34e0,
    4.630_337_846_156_545_295_9e0,
    5.769_497_221_460_691_405_5e0,
    3.647_848_324_763_204_605_04e0,
    1.270_458_252_452_368_382_58e0,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const MIDDLE_DEN: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87e0,
    1.676_384_830_183_803_849_4e0,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const TAIL_NUM: [f64; 8] = [
    6.657_904_643_501_103_777_2e0,
    5.463_784_911_164_114_369_9e0,
    1.784_826_539_917_291_335_8e0,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const TAIL_DEN: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];
