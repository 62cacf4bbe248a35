//! Single-item selection: t-wise CRS quality, threshold policies, the single-sample rule and the
//! almighty-adversary experiment.

mod almighty;
mod threshold;
mod twise;
mod values;

pub use almighty::*;
pub use threshold::*;
pub use twise::*;
pub use values::*;
