use serde::{Deserialize, Serialize};

use crate::scalar::Rational;

use super::GadgetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StretchProblem {
    DiameterApprox,
    RadiusApprox,
    EccApprox,
}

impl StretchProblem {
    /// Exclusive upper bound on `eps`.
    pub fn eps_bound(self) -> Rational {
        match self {
            StretchProblem::DiameterApprox | StretchProblem::RadiusApprox => Rational::new(1, 2),
            StretchProblem::EccApprox => Rational::new(2, 3),
        }
    }

    /// The value `P` has to exceed for the given `eps`.
    pub fn threshold(self, eps: Rational) -> Rational {
        let one = Rational::from_integer(1);
        match self {
            StretchProblem::DiameterApprox => one / (eps * 2) - Rational::new(1, 2),
            StretchProblem::RadiusApprox => one / (eps * 8) - Rational::new(1, 4),
            StretchProblem::EccApprox => Rational::from_integer(2) / (eps * 9) - Rational::new(1, 3),
        }
    }
}

/// Smallest integer `P >= 1` strictly above the problem's threshold.
pub fn min_stretch_p(problem: StretchProblem, eps: Rational) -> Result<u32, GadgetError> {
    if eps <= Rational::from_integer(0) || eps >= problem.eps_bound() {
        return Err(GadgetError::EpsOutOfRange(crate::scalar::render_rational(&eps)));
    }
    let t = problem.threshold(eps);
    let p = (t.floor() + 1).to_integer().max(1);
    u32::try_from(p).map_err(|_| GadgetError::EpsOutOfRange(crate::scalar::render_rational(&eps)))
}
