pub mod bits;
pub mod dist;
pub mod error;
pub mod fixtures;
pub mod lp;
pub mod matroid;
pub mod mc;
pub mod ocrs;
pub mod prophet;
pub mod rational;
pub mod regular;
pub mod single;
pub mod structured;
pub mod uniform;

pub use error::{Error, Result};
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/selectability.md")]
    mod selectability {}
    #[doc = include_str!("../../../book/src/matroids.md")]
    mod matroids {}
    #[doc = include_str!("../../../book/src/single_item.md")]
    mod single_item {}
    #[doc = include_str!("../../../book/src/prophet.md")]
    mod prophet {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
