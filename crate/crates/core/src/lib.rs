//! A Type-2 effectivity kernel: represented spaces over stream names, a
//! fuel-bounded interpreter for stream-transducer terms, Sierpiński-style
//! hyperspaces, five notions of effective base with executable witnesses,
//! the conversions between them, effective metrization, open choice, and an
//! oracle-parameterized gallery of separating examples.

pub mod dyadic;
pub mod hyperspaces;
pub mod bases;
pub mod spaces;
pub mod machine;
pub mod names;
