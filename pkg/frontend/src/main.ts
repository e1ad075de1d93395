// Bootstrap: bind the console to the static page and keep the feedback
// queue draining in the background.

import { ChatConsole, ConsoleElements } from "./ui.js";

function required<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

export function bootstrap(): ChatConsole {
  const elements: ConsoleElements = {
    messages: required("messages"),
    input: required<HTMLTextAreaElement>("input"),
    send: required<HTMLButtonElement>("send"),
    tokenInput: required<HTMLInputElement>("token"),
    tokenApply: required<HTMLButtonElement>("token-apply"),
    identity: required("identity"),
    chips: required("chips"),
    banner: required("banner"),
  };
  const chatConsole = new ChatConsole(elements);
  setInterval(() => void chatConsole.feedback.flush(), 5000);
  return chatConsole;
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  bootstrap();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", () => bootstrap());
}
