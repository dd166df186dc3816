//! Ground truth independent of the solver: the fast-diffusion source
//! solution and the weak-form residual.

pub mod barenblatt;
pub mod weak;

pub use barenblatt::{barenblatt_reference, self_similar_rate, SelfSimilarProfile};
pub use weak::{weak_residual, Bump, TestFunction, WeakFormOptions};
