//! Built-in kernels addressed by name.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expansion::{synth_bundle_kernel, BundleExpansion};
use crate::kernel::{
    const_kernel, coordinate_kernel, dot_kernel, gegenbauer_kernel, neg_dot_kernel, Lifted, SharedKernel,
};

pub const KERNEL_NAMES: &str = "dot, neg-dot, gegenbauer:K, const[:V], coord, bundle";

/// Degree and feature count of the random `bundle` kernel.
const BUNDLE_DEGREE: usize = 4;
const BUNDLE_FEATURES: usize = 3;

/// Resolves a named kernel. Sphere kernels are lifted to the bundle when `r > 0`
/// and `lift` is set; `bundle` is a random feature-map kernel drawn from `seed`.
pub fn named_kernel(name: &str, n: usize, r: usize, lift: bool, seed: u64) -> Result<SharedKernel> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let sphere: SharedKernel = match (head, arg) {
        ("dot", None) => Arc::new(dot_kernel(n)),
        ("neg-dot", None) => Arc::new(neg_dot_kernel(n)),
        ("coord", None) => Arc::new(coordinate_kernel(n)),
        ("const", value) => {
            let v = match value {
                Some(s) => s
                    .parse()
                    .map_err(|_| Error::Domain(format!("bad constant in kernel {name:?}")))?,
                None => 1.0,
            };
            Arc::new(const_kernel(n, v))
        }
        ("gegenbauer", Some(k)) => {
            let k = k
                .parse()
                .map_err(|_| Error::Domain(format!("bad degree in kernel {name:?}")))?;
            Arc::new(gegenbauer_kernel(n, k))
        }
        ("bundle", None) => {
            let e = BundleExpansion::random(n, r, BUNDLE_DEGREE, BUNDLE_FEATURES, seed)?;
            return Ok(Arc::new(synth_bundle_kernel(e)?));
        }
        _ => {
            return Err(Error::Domain(format!(
                "unknown kernel {name:?}; expected one of {KERNEL_NAMES}"
            )))
        }
    };
    if lift && r > 0 {
        Ok(Arc::new(Lifted::new(sphere, r)?))
    } else {
        Ok(sphere)
    }
}
