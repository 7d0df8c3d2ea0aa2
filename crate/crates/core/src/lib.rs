pub mod error;
pub mod cylinder;
pub mod frequency;
pub mod gvalued;
pub mod limit;
pub mod padic;
pub mod prime;
pub mod rational;

pub use error::{Error, Result};
pub use prime::Prime;
pub use rational::Rational;
