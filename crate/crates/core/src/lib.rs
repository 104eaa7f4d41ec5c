//! Rhetorical relation classification toolkit.
//!
//! The pipeline ingests annotated discourse units ([`corpus`]), encodes,
//! splits and balances them ([`dataset`]), turns pairs into feature vectors
//! ([`features`]), trains a multinomial logistic regression
//! ([`softmax`]) and scores it ([`evaluation`], [`report`]).
//!
//! ```
//! use rhetrel_core::{corpus, labels::LabelSet};
//!
//! let labels = LabelSet::canonical();
//! let doc = corpus::parse_standoff(
//!     "#DOC d\n#TEXT It rained, so play stopped.\nSPAN a 0 10\nSPAN b 11 27\nREL a b Cause-Effect\n",
//!     &labels,
//! )
//! .unwrap();
//! let pairs = corpus::pairs_from_document(&doc).unwrap();
//! assert_eq!(pairs[0].edu1, "It rained,");
//! assert_eq!(pairs[0].label, "Cause-Effect");
//! ```

pub mod corpus;
pub mod dataset;
pub mod evaluation;
pub mod features;
pub mod labels;
pub mod predictions;
pub mod report;
pub mod rng;
pub mod softmax;

pub use corpus::{AnnotatedDocument, CorpusError, LabeledPair};
pub use dataset::{EncodedDataset, SplitDataset, SplitRatios};
pub use evaluation::{EvalReport, Predictions};
pub use features::{DesignMatrix, EmbeddingTable, FeatureConfig, FeatureMode};
pub use labels::LabelSet;
pub use softmax::{FitResult, Hyperparams, SoftmaxModel};
