// Payload types mirroring the service's JSON API.

export interface RbacDecision {
  verdict: "Grant" | "Deny";
  role_used: string | null;
  reason: string;
}

export interface Violation {
  code: string;
  message: string;
  offset: number | null;
}

export interface ValidationReport {
  verdict: "Accepted" | "Rejected";
  violations: Violation[];
  effective_limit: number;
  limit_injected: boolean;
}

export interface ResultRows {
  columns: string[];
  rows: (string | number | boolean | null)[][];
}

export interface Explanation {
  capability: string;
  args: Record<string, unknown>;
  rbac: RbacDecision;
  cypher_text: string | null;
  validation: ValidationReport | null;
  rows: ResultRows | null;
  anomalies: string[];
}

export interface ChatResponse {
  turn_id: string;
  reply: string;
  explanation: Explanation;
}

export interface RolesMe {
  user: string;
  roles: string[];
  capabilities: string[];
}

export interface FeedbackRequest {
  turn_id: string;
  rating: "up" | "down";
  comment?: string;
}
