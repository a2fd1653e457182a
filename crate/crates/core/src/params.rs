use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::Result;

/// Spin × particle/antiparticle degeneracy of a Dirac field.
pub const DEFAULT_DEGENERACY: f64 = 4.0;

/// Below this `m/T` the 1/m² tensors (GLW, HW) still evaluate but their
/// fluctuations grow like `T²/m²`.
pub const SMALL_MASS_RATIO: f64 = 1e-3;

/// Choice of energy-momentum tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PseudoGauge {
    Canonical,
    BelinfanteRosenfeld,
    Glw,
    Hw,
}

impl PseudoGauge {
    pub const ALL: [PseudoGauge; 4] = [
        PseudoGauge::Canonical,
        PseudoGauge::BelinfanteRosenfeld,
        PseudoGauge::Glw,
        PseudoGauge::Hw,
    ];

    /// The gauge whose `T⁰⁰` is actually evaluated. The Belinfante-Rosenfeld
    /// correction is a total divergence with no `00` component, so it shares
    /// the canonical kernel.
    pub const fn kernel_gauge(self) -> PseudoGauge {
        match self {
            PseudoGauge::BelinfanteRosenfeld => PseudoGauge::Canonical,
            g => g,
        }
    }

    /// GLW and HW carry explicit 1/m factors.
    pub const fn requires_mass(self) -> bool {
        matches!(self, PseudoGauge::Glw | PseudoGauge::Hw)
    }

    /// Short tag used on the command line and in CSV output.
    pub const fn tag(self) -> &'static str {
        match self {
            PseudoGauge::Canonical => "can",
            PseudoGauge::BelinfanteRosenfeld => "br",
            PseudoGauge::Glw => "glw",
            PseudoGauge::Hw => "hw",
        }
    }
}

impl fmt::Display for PseudoGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PseudoGauge::Canonical => "canonical",
            PseudoGauge::BelinfanteRosenfeld => "Belinfante-Rosenfeld",
            PseudoGauge::Glw => "GLW",
            PseudoGauge::Hw => "HW",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownGauge;

impl fmt::Display for UnknownGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of can, br, glw, hw")
    }
}

impl FromStr for PseudoGauge {
    type Err = UnknownGauge;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let s = s.trim();
        let candidates: [(PseudoGauge, &[&str]); 4] = [
            (PseudoGauge::Canonical, &["can", "canonical"]),
            (PseudoGauge::BelinfanteRosenfeld, &["br", "belinfante-rosenfeld"]),
            (PseudoGauge::Glw, &["glw"]),
            (PseudoGauge::Hw, &["hw"]),
        ];
        candidates
            .iter()
            .find(|(_, names)| names.iter().any(|n| n.eq_ignore_ascii_case(s)))
            .map(|(g, _)| *g)
            .ok_or(UnknownGauge)
    }
}

/// Physical inputs for one evaluation, in natural units.
///
/// `mass` and `temperature` are energies, `radius_a` is an inverse energy
/// (a length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    mass: f64,
    temperature: f64,
    radius_a: f64,
    degeneracy: f64,
}

impl SystemParams {
    /// Parameters with the Dirac degeneracy of 4.
    pub fn new(mass: f64, temperature: f64, radius_a: f64) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: mass,
                reason: "must be finite and non-negative",
            });
        }
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::InvalidParameter {
                name: "temperature",
                value: temperature,
                reason: "must be finite and positive",
            });
        }
        if !(radius_a.is_finite() && radius_a > 0.0) {
            return Err(Error::InvalidParameter {
                name: "radius_a",
                value: radius_a,
                reason: "must be finite and positive",
            });
        }
        Ok(SystemParams {
            mass,
            temperature,
            radius_a,
            degeneracy: DEFAULT_DEGENERACY,
        })
    }

    pub fn with_degeneracy(mut self, degeneracy: f64) -> Result<Self> {
        if !(degeneracy.is_finite() && degeneracy >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "degeneracy",
                value: degeneracy,
                reason: "must be finite and at least 1",
            });
        }
        self.degeneracy = degeneracy;
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn radius_a(&self) -> f64 {
        self.radius_a
    }

    pub fn degeneracy(&self) -> f64 {
        self.degeneracy
    }

    /// `m/T`.
    pub fn mass_ratio(&self) -> f64 {
        self.mass / self.temperature
    }

    /// `a·T`.
    pub fn radius_ratio(&self) -> f64 {
        self.radius_a * self.temperature
    }

    /// The same physical point measured in units of the temperature:
    /// `(m/T, 1, a·T)`.
    pub fn in_thermal_units(&self) -> SystemParams {
        SystemParams {
            mass: self.mass_ratio(),
            temperature: 1.0,
            radius_a: self.radius_ratio(),
            degeneracy: self.degeneracy,
        }
    }

    /// `(λm, λT, a/λ)`; leaves every dimensionless combination unchanged.
    pub fn rescaled(&self, lambda: f64) -> Result<SystemParams> {
        SystemParams::new(self.mass * lambda, self.temperature * lambda, self.radius_a / lambda)?
            .with_degeneracy(self.degeneracy)
    }

    /// Fails with [`Error::MassRequiredForGauge`] for GLW/HW at zero mass.
    pub fn check_gauge(&self, gauge: PseudoGauge) -> Result<()> {
        if gauge.requires_mass() && self.mass == 0.0 {
            return Err(Error::MassRequiredForGauge { gauge });
        }
        Ok(())
    }

    /// True when a 1/m² tensor is evaluated at `m/T` below
    /// [`SMALL_MASS_RATIO`]. The result is still computed.
    pub fn small_mass_warning(&self, gauge: PseudoGauge) -> bool {
        gauge.requires_mass() && self.mass > 0.0 && self.mass_ratio() < SMALL_MASS_RATIO
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_inputs() {
        assert!(SystemParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(SystemParams::new(1.0, 0.0, 1.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, f64::NAN, 1.0).is_err());
        assert!(SystemParams::new(0.0, 1.0, 1.0).is_ok());
        let p = SystemParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(p.with_degeneracy(0.5).is_err());
        assert_eq!(p.with_degeneracy(12.0).unwrap().degeneracy(), 12.0);
        assert_eq!(p.degeneracy(), DEFAULT_DEGENERACY);
    }

    #[test]
    fn br_aliases_canonical() {
        assert_eq!(PseudoGauge::BelinfanteRosenfeld.kernel_gauge(), PseudoGauge::Canonical);
        assert_eq!(PseudoGauge::Hw.kernel_gauge(), PseudoGauge::Hw);
    }

    #[test]
    fn parses_tags() {
        for g in PseudoGauge::ALL {
            assert_eq!(g.tag().parse::<PseudoGauge>(), Ok(g));
        }
        assert_eq!("Canonical".parse::<PseudoGauge>(), Ok(PseudoGauge::Canonical));
        assert!("bogus".parse::<PseudoGauge>().is_err());
    }

    #[test]
    fn zero_mass_gate() {
        let p = SystemParams::new(0.0, 1.0, 1.0).unwrap();
        assert!(p.check_gauge(PseudoGauge::Canonical).is_ok());
        assert!(p.check_gauge(PseudoGauge::BelinfanteRosenfeld).is_ok());
        assert_eq!(
            p.check_gauge(PseudoGauge::Glw),
            Err(Error::MassRequiredForGauge { gauge: PseudoGauge::Glw })
        );
        let light = SystemParams::new(1e-4, 1.0, 1.0).unwrap();
        assert!(light.small_mass_warning(PseudoGauge::Hw));
        assert!(!light.small_mass_warning(PseudoGauge::Canonical));
    }

    #[test]
    fn thermal_units() {
        let p = SystemParams::new(2.0, 4.0, 0.25).unwrap();
        let d = p.in_thermal_units();
        assert_eq!((d.mass(), d.temperature(), d.radius_a()), (0.5, 1.0, 1.0));
    }
}
