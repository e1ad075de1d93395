"""kgchat: a knowledge-graph-backed chat service with validated Cypher
queries, role-based access control, and full answer provenance."""

__version__ = "0.1.0"
