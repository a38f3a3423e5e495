"""credo: credibility scoring for textual claims.

Pipeline: keyword extraction over the claim, BM25 retrieval of evidence
from a local knowledge base, extractive summarization of the evidence,
author/website trust ledgers, siamese-LSTM semantic similarity, sentiment
neutrality, and a learned weighted fusion producing a score in [0, 1].
"""

__version__ = "0.1.0"

from .ensemble import ClaimArticle, CredoScore, FeatureBundle, WeightVector  # noqa: F401
from .bm25 import KbDocument, ResultSet, RetrievedDoc  # noqa: F401
from .trust import LedgerEntry, ReputationProvider, TrustLedger  # noqa: F401
