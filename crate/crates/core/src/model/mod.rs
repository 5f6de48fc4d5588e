//! Spectral densities with a seasonal pole and the filters used to probe them.

mod config;
mod filter;
mod gegenbauer;
mod spectral;

pub use config::{Family, FilterConfig, ModelConfig};
pub use filter::{
    builtin_filter, BandLimit, FilterSpec, PsiFn, PsiHatFn, BUILTIN_FILTERS, EFFECTIVE_BAND_THRESHOLD,
    GAUSSIAN_SUPPORT_THRESHOLD, SHANNON_SUPPORT_THRESHOLD,
};
pub use gegenbauer::GegenbauerSpec;
pub(crate) use spectral::density_unchecked;
pub use spectral::{covariance_eval, density_eval, Factor, FactorFn, SpectralModel};
