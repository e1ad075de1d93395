// Typed client for the documented JSON endpoints. The base URL defaults to
// same-origin and can be overridden at runtime via window.KGCHAT_BASE_URL.

import { ChatResponse, FeedbackRequest, RolesMe } from "./types.js";

declare global {
  interface Window {
    KGCHAT_BASE_URL?: string;
  }
}

export function baseUrl(): string {
  if (typeof window !== "undefined" && window.KGCHAT_BASE_URL) {
    return window.KGCHAT_BASE_URL.replace(/\/$/, "");
  }
  return "";
}

export class ApiError extends Error {
  status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") {
      message = body.error;
    }
  } catch {
    // keep the fallback message
  }
  return new ApiError(response.status, message);
}

export async function postChat(
  token: string,
  sessionId: string,
  message: string,
): Promise<ChatResponse> {
  const response = await fetch(`${baseUrl()}/api/chat`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ token, session_id: sessionId, message }),
  });
  if (!response.ok) {
    throw await parseError(response);
  }
  return (await response.json()) as ChatResponse;
}

export async function postFeedback(request: FeedbackRequest): Promise<void> {
  const response = await fetch(`${baseUrl()}/api/feedback`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(request),
  });
  if (!response.ok) {
    throw await parseError(response);
  }
}

export async function getRolesMe(token: string): Promise<RolesMe> {
  const response = await fetch(`${baseUrl()}/api/roles/me`, {
    headers: { Authorization: `Bearer ${token}` },
  });
  if (!response.ok) {
    throw await parseError(response);
  }
  return (await response.json()) as RolesMe;
}

export async function getHealth(): Promise<{ status: string; articles: number }> {
  const response = await fetch(`${baseUrl()}/api/health`);
  if (!response.ok) {
    throw await parseError(response);
  }
  return await response.json();
}
