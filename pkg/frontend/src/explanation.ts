// Renders the provenance drawer for one chat turn.
//
// The rendering is deliberately lossless and non-inventive: every field
// present in the API explanation appears, and absent fields (cypher_text,
// rows on a denied turn) produce no section at all.

import { Explanation } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function rbacBadge(explanation: Explanation): HTMLElement {
  const badge = el(
    "span",
    explanation.rbac.verdict === "Grant" ? "badge badge-grant" : "badge badge-deny",
    explanation.rbac.verdict,
  );
  badge.title = explanation.rbac.reason;
  return badge;
}

function rowsTable(explanation: Explanation): HTMLElement | null {
  if (!explanation.rows) {
    return null;
  }
  const table = el("table", "rows-table");
  const head = el("tr");
  for (const column of explanation.rows.columns) {
    head.appendChild(el("th", undefined, column));
  }
  table.appendChild(head);
  for (const row of explanation.rows.rows) {
    const tr = el("tr");
    for (const cell of row) {
      tr.appendChild(el("td", undefined, cell === null ? "null" : String(cell)));
    }
    table.appendChild(tr);
  }
  return table;
}

/** Collapsible drawer ("details" keeps it closed by default). */
export function renderExplanation(explanation: Explanation): HTMLElement {
  const drawer = el("details", "explanation");
  const summary = el("summary");
  summary.appendChild(el("span", "capability", explanation.capability));
  summary.appendChild(rbacBadge(explanation));
  drawer.appendChild(summary);

  const body = el("div", "explanation-body");
  body.appendChild(el("div", "rbac-reason", explanation.rbac.reason));

  if (explanation.cypher_text !== null) {
    const section = el("div", "section section-cypher");
    section.appendChild(el("h4", undefined, "Executed Cypher"));
    section.appendChild(el("pre", "cypher-text", explanation.cypher_text));
    body.appendChild(section);
  }

  if (explanation.validation !== null) {
    const section = el("div", "section section-validation");
    section.appendChild(el("h4", undefined, `Validation: ${explanation.validation.verdict}`));
    if (explanation.validation.violations.length > 0) {
      const list = el("ul", "violations");
      for (const violation of explanation.validation.violations) {
        list.appendChild(el("li", undefined, `${violation.code}: ${violation.message}`));
      }
      section.appendChild(list);
    } else {
      section.appendChild(
        el("div", "limit",
           `effective limit ${explanation.validation.effective_limit}` +
           (explanation.validation.limit_injected ? " (injected)" : "")));
    }
    body.appendChild(section);
  }

  const table = rowsTable(explanation);
  if (table !== null) {
    const section = el("div", "section section-rows");
    section.appendChild(el("h4", undefined, `Rows (${explanation.rows!.rows.length})`));
    section.appendChild(table);
    body.appendChild(section);
  }

  if (explanation.anomalies.length > 0) {
    const section = el("div", "section section-anomalies");
    section.appendChild(el("h4", undefined, "Anomalies"));
    const list = el("ul", "anomalies");
    for (const anomaly of explanation.anomalies) {
      list.appendChild(el("li", undefined, anomaly));
    }
    section.appendChild(list);
    body.appendChild(section);
  }

  drawer.appendChild(body);
  return drawer;
}
