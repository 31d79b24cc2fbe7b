use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// hbar and c in internal units. The default is the natural system (both 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants<T> {
    pub hbar: T,
    pub c: T,
}

impl<T: Real> Constants<T> {
    pub fn natural() -> Self {
        Constants {
            hbar: T::one(),
            c: T::one(),
        }
    }
}

impl<T: Real> Default for Constants<T> {
    fn default() -> Self {
        Self::natural()
    }
}
