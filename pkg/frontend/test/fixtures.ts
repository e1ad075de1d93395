// Recorded API payloads: one granted KG turn, one denied turn.

import { ChatResponse, Explanation } from "../src/types.js";

export const GRANT_EXPLANATION: Explanation = {
  capability: "SimilarArticles",
  args: { article_id: 100, k: 5 },
  rbac: { verdict: "Grant", role_used: "analyst", reason: "role 'analyst' grants SimilarArticles" },
  cypher_text:
    "MATCH (a1:Article {article_id: 100}), (a2:Article) WHERE a1 <> a2 " +
    "WITH a1, a2, gds.similarity.cosine(a1.content_vector, a2.content_vector) AS similarity_score " +
    "RETURN similarity_score, a1.article_id, a2.article_id ORDER BY similarity_score DESC LIMIT 5",
  validation: { verdict: "Accepted", violations: [], effective_limit: 5, limit_injected: false },
  rows: {
    columns: ["similarity_score", "a1.article_id", "a2.article_id"],
    rows: [
      [0.9898, 100, 101],
      [0.3717, 100, 105],
    ],
  },
  anomalies: [],
};

export const DENY_EXPLANATION: Explanation = {
  capability: "SimilarArticles",
  args: { article_id: 100, k: 5 },
  rbac: {
    verdict: "Deny",
    role_used: null,
    reason: "none of your roles grant the SimilarArticles capability",
  },
  cypher_text: null,
  validation: null,
  rows: null,
  anomalies: [],
};

export const GRANT_RESPONSE: ChatResponse = {
  turn_id: "turn-grant-1",
  reply: "Top similar articles: #101 (score 0.99), #105 (score 0.37)",
  explanation: GRANT_EXPLANATION,
};

export const DENY_RESPONSE: ChatResponse = {
  turn_id: "turn-deny-1",
  reply: "Access denied: none of your roles grant the SimilarArticles capability.",
  explanation: DENY_EXPLANATION,
};
