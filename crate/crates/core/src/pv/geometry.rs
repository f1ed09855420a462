//! Declination and beam radiation on a tilted plane.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::scalar::{lit, Scalar};

/// Solar declination in degrees (Cooper): `23.45 * sin(360 * (284 + n) / 365)`.
pub fn declination<T: Scalar>(day_of_year: u32) -> T {
    let n: T = lit(day_of_year as f64);
    let angle: T = lit::<T>(360.0) * (lit::<T>(284.0) + n) / lit(365.0);
    lit::<T>(23.45) * angle.to_radians().sin()
}

/// Compass sector a roof plane faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Azimuth {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Azimuth {
    pub const ALL: [Azimuth; 8] = [
        Azimuth::N,
        Azimuth::NE,
        Azimuth::E,
        Azimuth::SE,
        Azimuth::S,
        Azimuth::SW,
        Azimuth::W,
        Azimuth::NW,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Azimuth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Azimuth::N => "N",
            Azimuth::NE => "NE",
            Azimuth::E => "E",
            Azimuth::SE => "SE",
            Azimuth::S => "S",
            Azimuth::SW => "SW",
            Azimuth::W => "W",
            Azimuth::NW => "NW",
        };
        f.write_str(s)
    }
}

impl FromStr for Azimuth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Azimuth::ALL
            .into_iter()
            .find(|a| a.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown azimuth sector {s:?}")))
    }
}

/// Orientation degradation factor `D(ω)` per sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationTable<T> {
    pub factors: [T; 8],
}

impl<T: Scalar> Default for DegradationTable<T> {
    fn default() -> Self {
        // N, NE, E, SE, S, SW, W, NW
        let f = [0.55, 0.70, 0.85, 0.95, 1.00, 0.95, 0.85, 0.70];
        DegradationTable { factors: f.map(lit) }
    }
}

impl<T: Scalar> DegradationTable<T> {
    pub fn factor(&self, a: Azimuth) -> T {
        self.factors[a.index()]
    }
}

/// Below this `sin(α)` the tilt ratio is dropped and `ghi * D` is used.
pub const MIN_SIN_ALPHA: f64 = 0.01;

/// Multiplier turning GHI into tilted-plane radiation:
/// `sin(α + θ) / sin(α) * D`, with `α = 90° - lat + δ`, floored at zero.
pub fn tilt_factor<T: Scalar>(lat: T, delta: T, tilt: T, degradation: T) -> T {
    let alpha = lit::<T>(90.0) - lat + delta;
    let sin_alpha = alpha.to_radians().sin();
    if sin_alpha <= lit(MIN_SIN_ALPHA) {
        return degradation.max(T::zero());
    }
    let ratio = (alpha + tilt).to_radians().sin() / sin_alpha;
    (ratio * degradation).max(T::zero())
}

/// Radiation on a tilted plane, W/m².
pub fn tilted_radiation<T: Scalar>(
    ghi: T,
    lat: T,
    delta: T,
    tilt: T,
    azimuth: Azimuth,
    table: &DegradationTable<T>,
) -> T {
    ghi * tilt_factor(lat, delta, tilt, table.factor(azimuth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declination_extremes_and_equinox() {
        assert!((declination::<f64>(172) - 23.45).abs() < 0.05);
        assert!((declination::<f64>(355) + 23.45).abs() < 0.05);
        assert!(declination::<f64>(81).abs() < 0.5);
        for n in 1..=366 {
            assert!(declination::<f64>(n).abs() <= 23.45);
        }
    }

    #[test]
    fn flat_plane_is_identity_times_degradation() {
        let t = DegradationTable::<f64>::default();
        for (ghi, lat, delta) in [(500.0, 38.0, 0.0), (812.3, 45.5, -17.2), (1.0, 10.0, 23.0)] {
            for a in Azimuth::ALL {
                assert_eq!(tilted_radiation(ghi, lat, delta, 0.0, a, &t), ghi * t.factor(a));
            }
        }
    }

    #[test]
    fn reference_tilted_value() {
        let t = DegradationTable::<f64> { factors: [1.0; 8] };
        let ht = tilted_radiation(500.0, 38.0, 0.0, 30.0, Azimuth::S, &t);
        let expected = 500.0 * 82f64.to_radians().sin() / 52f64.to_radians().sin();
        assert!((ht - expected).abs() < 1e-9);
        assert!((ht - 628.3).abs() < 0.1, "{ht}");
    }

    #[test]
    fn zero_ghi_and_polar_guard() {
        let t = DegradationTable::<f64>::default();
        assert_eq!(tilted_radiation(0.0, 38.0, 5.0, 35.0, Azimuth::E, &t), 0.0);
        // lat 89.9, δ = -23: α < 0, guard path
        assert_eq!(tilted_radiation(100.0, 89.9, -23.0, 30.0, Azimuth::S, &t), 100.0);
        // α + θ beyond 180° is clamped at zero
        assert_eq!(tilted_radiation(100.0, 0.0, 23.0, 89.0, Azimuth::S, &t), 0.0);
    }

    #[test]
    fn works_in_f32() {
        let t = DegradationTable::<f32>::default();
        let ht = tilted_radiation(500.0f32, 38.0, 0.0, 30.0, Azimuth::S, &t);
        assert!((ht - 628.3).abs() < 0.1);
        assert!((declination::<f32>(172) - 23.45).abs() < 0.05);
    }

    #[test]
    fn azimuth_parse() {
        assert_eq!("sw".parse::<Azimuth>().unwrap(), Azimuth::SW);
        assert!("up".parse::<Azimuth>().is_err());
    }
}
