// Session state: turns are append-only, and switching to a new token
// always starts a fresh session id.

import { ChatResponse } from "./types.js";

export interface UiTurn {
  userMessage: string;
  response: ChatResponse;
}

export interface UiSession {
  sessionId: string;
  token: string;
  turns: UiTurn[];
}

export function newSessionId(): string {
  return `ui-${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

export function createSession(token: string): UiSession {
  return { sessionId: newSessionId(), token, turns: [] };
}

export function appendTurn(session: UiSession, turn: UiTurn): UiSession {
  session.turns.push(turn);
  return session;
}

/** A different token starts a new session; the same token keeps it. */
export function switchToken(session: UiSession, token: string): UiSession {
  if (token === session.token) {
    return session;
  }
  return createSession(token);
}
