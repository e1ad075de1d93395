// DOM wiring for the chat console: message bubbles with the provenance
// drawer, role chips from /api/roles/me, token switching, and feedback
// buttons. One chat request is in flight per session at a time.

import { ApiError, getRolesMe, postChat } from "./api.js";
import { renderExplanation } from "./explanation.js";
import { FeedbackTracker } from "./feedback.js";
import { UiSession, appendTurn, createSession, switchToken } from "./session.js";
import { ChatResponse } from "./types.js";

export interface ConsoleElements {
  messages: HTMLElement;
  input: HTMLInputElement | HTMLTextAreaElement;
  send: HTMLButtonElement;
  tokenInput: HTMLInputElement;
  tokenApply: HTMLButtonElement;
  identity: HTMLElement;
  chips: HTMLElement;
  banner: HTMLElement;
}

export class ChatConsole {
  session: UiSession;
  feedback: FeedbackTracker;
  private elements: ConsoleElements;
  private inFlight = false;

  constructor(elements: ConsoleElements, feedback: FeedbackTracker = new FeedbackTracker()) {
    this.elements = elements;
    this.feedback = feedback;
    this.session = createSession("");
    this.feedback.onChange = () => this.refreshFeedbackButtons();
    elements.input.addEventListener("input", () => this.refreshSendState());
    elements.send.addEventListener("click", () => void this.sendCurrentInput());
    elements.input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter" && !(event as KeyboardEvent).shiftKey) {
        event.preventDefault();
        void this.sendCurrentInput();
      }
    });
    elements.tokenApply.addEventListener("click", () => void this.applyToken());
    this.refreshSendState();
  }

  refreshSendState(): void {
    const empty = this.elements.input.value.trim().length === 0;
    this.elements.send.disabled = empty || this.inFlight || !this.session.token;
  }

  setBanner(text: string, kind: "error" | "info" | "none"): void {
    this.elements.banner.textContent = text;
    this.elements.banner.className = kind === "none" ? "banner hidden" : `banner banner-${kind}`;
  }

  /** Switch role: validate the token, show capability chips, new session. */
  async applyToken(): Promise<void> {
    const token = this.elements.tokenInput.value.trim();
    if (!token) {
      this.setBanner("Paste a token first.", "error");
      return;
    }
    try {
      const me = await getRolesMe(token);
      this.session = switchToken(this.session, token);
      this.elements.identity.textContent = `${me.user} (${me.roles.join(", ")})`;
      this.renderChips(me.capabilities);
      this.setBanner("", "none");
      this.systemBubble(`Signed in as ${me.user}; new session started.`);
    } catch (error) {
      if (error instanceof ApiError && error.status === 401) {
        this.setBanner("Invalid token.", "error");
      } else {
        this.setBanner("Could not reach the service.", "error");
      }
    }
    this.refreshSendState();
  }

  renderChips(capabilities: string[]): void {
    this.elements.chips.replaceChildren();
    for (const capability of capabilities) {
      const chip = document.createElement("span");
      chip.className = "chip";
      chip.textContent = capability;
      this.elements.chips.appendChild(chip);
    }
  }

  async sendCurrentInput(): Promise<void> {
    const text = this.elements.input.value.trim();
    if (!text || this.inFlight || !this.session.token) {
      return;
    }
    this.elements.input.value = "";
    await this.sendMessage(text);
  }

  /** POST /api/chat and render the reply bubble plus provenance drawer. */
  async sendMessage(text: string): Promise<void> {
    this.inFlight = true;
    this.refreshSendState();
    this.bubble("user", text);
    try {
      const response = await postChat(this.session.token, this.session.sessionId, text);
      appendTurn(this.session, { userMessage: text, response });
      this.renderResponse(response);
    } catch (error) {
      if (error instanceof ApiError && error.status === 401) {
        this.setBanner("Invalid token; paste a valid one to continue.", "error");
        this.systemBubble("The service rejected the token (401).");
      } else {
        this.retryBubble(text);
      }
    } finally {
      this.inFlight = false;
      this.refreshSendState();
    }
  }

  renderResponse(response: ChatResponse): void {
    const bubble = this.bubble("assistant", response.reply);
    bubble.appendChild(renderExplanation(response.explanation));
    bubble.appendChild(this.feedbackButtons(response.turn_id));
  }

  private feedbackButtons(turnId: string): HTMLElement {
    const bar = document.createElement("div");
    bar.className = "feedback";
    bar.dataset.turnId = turnId;
    for (const rating of ["up", "down"] as const) {
      const button = document.createElement("button");
      button.className = `feedback-${rating}`;
      button.textContent = rating === "up" ? "\u{1F44D}" : "\u{1F44E}";
      button.addEventListener("click", () => void this.feedback.submit(turnId, rating));
      bar.appendChild(button);
    }
    const state = document.createElement("span");
    state.className = "feedback-state";
    bar.appendChild(state);
    return bar;
  }

  refreshFeedbackButtons(): void {
    const bars = this.elements.messages.querySelectorAll<HTMLElement>(".feedback");
    bars.forEach((bar) => {
      const turnId = bar.dataset.turnId ?? "";
      const { rating, state } = this.feedback.stateFor(turnId);
      bar.querySelectorAll("button").forEach((button) => button.classList.remove("selected"));
      if (rating) {
        bar.querySelector(`.feedback-${rating}`)?.classList.add("selected");
      }
      const label = bar.querySelector(".feedback-state");
      if (label) {
        label.textContent =
          state === "pending" ? "queued, retrying…" : state === "stored" ? "recorded" : "";
      }
    });
  }

  bubble(kind: "user" | "assistant", text: string): HTMLElement {
    const node = document.createElement("div");
    node.className = `bubble bubble-${kind}`;
    const body = document.createElement("div");
    body.className = "bubble-text";
    body.textContent = text;
    node.appendChild(body);
    this.elements.messages.appendChild(node);
    return node;
  }

  systemBubble(text: string): HTMLElement {
    const node = document.createElement("div");
    node.className = "bubble bubble-system";
    node.textContent = text;
    this.elements.messages.appendChild(node);
    return node;
  }

  /** Network failures render as a system bubble with a retry button. */
  retryBubble(text: string): void {
    const node = this.systemBubble("Network failure; the message was not delivered. ");
    const retry = document.createElement("button");
    retry.className = "retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => {
      node.remove();
      void this.sendMessage(text);
    });
    node.appendChild(retry);
  }
}
