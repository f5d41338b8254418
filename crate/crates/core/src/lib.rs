//! Entropic uncertainty of power-law quantum wave packets.
//!
//! The packet `φ(x) = N (1 + x²)^{−α/2}` is normalizable for `α > 1/2`, but
//! its position variance diverges for `α ≤ 3/2`. The Shannon entropies of
//! the position and momentum densities stay finite for every admissible α,
//! and their sum approaches the lower bound `1 + ln π` as α grows.
//!
//! Modules, bottom up:
//!
//! - [`specfun`]: `ln Γ`, `ψ` and `ln K_ν` for real order.
//! - [`quadrature`]: tanh-sinh / exp-sinh and adaptive Gauss–Kronrod.
//! - [`packet`]: amplitudes, log-densities, potential and moments.
//! - [`entropy`]: closed and numeric entropies, the uncertainty sum.
//! - [`crosscheck`]: independent oracles for every closed form.
//!
//! ```
//! use entropic_core::{make_packet, total_uncertainty, QuadratureConfig};
//!
//! let packet = make_packet(2.0).unwrap();
//! let report = total_uncertainty(&packet, &QuadratureConfig::default()).unwrap();
//! assert!((report.s_p - 1.0).abs() < 1e-9);
//! assert!(report.gap > 0.0);
//! ```

pub mod crosscheck;
pub mod entropy;
pub mod packet;
pub mod quadrature;
pub mod specfun;

pub use crosscheck::{run_all, CheckEntry, CrosscheckError, CrosscheckReport};
pub use entropy::{entropic_bound, total_uncertainty, EntropyError, EntropyReport, Method};
pub use packet::{make_packet, MomentValue, PacketError, PowerLawPacket, VarianceReport};
pub use quadrature::{IntegrationResult, QuadratureConfig, QuadratureError};
pub use specfun::SpecFunError;
