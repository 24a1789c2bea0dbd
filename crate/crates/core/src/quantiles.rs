//! Standard-normal quantile and the one-degree-of-freedom chi-squared
//! critical point consumed by every interval formula.

use crate::error::{Error, Result};

/// Upper tail area `alpha` of a two-sided test, i.e. confidence level `1 - alpha`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TailArea(f64);

impl TailArea {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::out_of_range("alpha", alpha, "0 <= alpha <= 1"));
        }
        Ok(TailArea(alpha))
    }

    /// Like [`TailArea::new`] but rejects the degenerate levels 0 and 1.
    pub fn new_open(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::out_of_range("alpha", alpha, "0 < alpha < 1"));
        }
        Ok(TailArea(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn confidence_level(self) -> f64 {
        1.0 - self.0
    }
}

/// The critical point `chi_sq` with upper tail area alpha under ChiSq(1),
/// together with its square root `chi`.
///
/// `chi_sq` is `f64::INFINITY` only for `alpha = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub chi_sq: f64,
    pub chi: f64,
}

impl CriticalPoint {
    pub fn is_infinite(&self) -> bool {
        self.chi_sq.is_infinite()
    }

    pub fn is_zero(&self) -> bool {
        self.chi_sq == 0.0
    }
}

/// Inverse of the standard normal CDF.
///
/// Uses Wichura's PPND16 rational approximations (relative accuracy about
/// 1e-16). Only the lower half is evaluated directly; `p > 0.5` is reflected,
/// so `normal_quantile(1 - p) == -normal_quantile(p)` whenever `1 - p` is
/// exactly representable.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::out_of_range("p", p, "0 < p < 1"));
    }
    if p > 0.5 {
        Ok(-lower_half_quantile(1.0 - p))
    } else {
        Ok(lower_half_quantile(p))
    }
}

/// Returns the +infinity sentinel at `alpha = 0` and zero at `alpha = 1`.
pub fn chi_sq_critical(alpha: TailArea) -> CriticalPoint {
    let a = alpha.value();
    if a == 0.0 {
        return CriticalPoint {
            chi_sq: f64::INFINITY,
            chi: f64::INFINITY,
        };
    }
    if a == 1.0 {
        return CriticalPoint {
            chi_sq: 0.0,
            chi: 0.0,
        };
    }
    // Upper quantile via the lower tail keeps full precision for small alpha.
    let chi = -lower_half_quantile(0.5 * a);
    CriticalPoint {
        chi_sq: chi * chi,
        chi,
    }
}

fn poly(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

#[allow(clippy::excessive_precision)]
const CENTRAL_NUM: [f64; 8] = [
    3.387_132_872_796_366_608,
    133.141_667_891_784_377_45,
    1_971.590_950_306_551_442_7,
    13_731.693_765_509_461_125,
    45_921.953_931_549_871_457,
    67_265.770_927_008_700_853,
    33_430.575_583_588_128_105,
    2_509.080_928_730_122_672_7,
];
#[allow(clippy::excessive_precision)]
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    42.313_330_701_600_911_252,
    687.187_007_492_057_908_3,
    5_394.196_021_424_751_107_7,
    21_213.794_301_586_595_867,
    39_307.895_800_092_710_61,
    28_729.085_735_721_942_674,
    5_226.495_278_852_545_925,
];
#[allow(clippy::excessive_precision)]
const INTERMEDIATE_NUM: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    0.241_780_725_177_450_611_77,
    0.022_723_844_989_269_184_583_3,
    7.745_450_142_783_414_076_4e-4,
];
#[allow(clippy::excessive_precision)]
const INTERMEDIATE_DEN: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    0.689_767_334_985_100_004_55,
    0.148_103_976_427_480_074_59,
    0.015_198_666_563_616_457_196_6,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
#[allow(clippy::excessive_precision)]
const TAIL_NUM: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    0.296_560_571_828_504_891_23,
    0.026_532_189_526_576_123_093,
    0.001_242_660_947_388_078_438_6,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
#[allow(clippy::excessive_precision)]
const TAIL_DEN: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_937_69,
    0.136_929_880_922_735_805_31,
    0.014_875_361_290_850_614_852_5,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

// Requires 0 < p <= 0.5; result is <= 0.
fn lower_half_quantile(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&CENTRAL_NUM, r) / poly(&CENTRAL_DEN, r);
    }
    let r = (-p.ln()).sqrt();
    let z = if r <= 5.0 {
        let r = r - 1.6;
        poly(&INTERMEDIATE_NUM, r) / poly(&INTERMEDIATE_DEN, r)
    } else {
        let r = r - 5.0;
        poly(&TAIL_NUM, r) / poly(&TAIL_DEN, r)
    };
    -z
}
