/** Browser entry point: wires the form to a SessionController. */

import * as api from "./api.js";
import { SessionController, type StartInputs } from "./app.js";

function input(doc: Document, id: string): HTMLInputElement {
  return doc.getElementById(id) as HTMLInputElement;
}

function readForm(doc: Document): StartInputs {
  const legendType = (doc.getElementById("legend-type") as HTMLSelectElement)
    .value as "binary" | "majority";
  const targets = input(doc, "target-classes")
    .value.split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map(Number);
  const imageUrl = input(doc, "image-url").value.trim();
  return {
    base: input(doc, "base-url").value.trim(),
    legendType,
    targetClasses: targets,
    threshold: Number(input(doc, "threshold").value),
    alpha: Number(input(doc, "alpha").value),
    side: Number(input(doc, "side").value),
    classCount: Number(input(doc, "class-count").value),
    nMax: Number(input(doc, "n-max").value),
    seed: Number(input(doc, "seed").value),
    imageUrl: imageUrl.length > 0 ? imageUrl : null,
  };
}

export function boot(doc: Document): SessionController {
  const controller = new SessionController({
    api,
    sessionRoot: doc.getElementById("session")!,
    errorRoot: doc.getElementById("errors")!,
    onSession: (base, sessionId) => {
      const url = new URL(doc.defaultView!.location.href);
      url.searchParams.set("base", base);
      url.searchParams.set("session", sessionId);
      doc.defaultView!.history.replaceState(null, "", url);
    },
  });

  doc.getElementById("start-form")!.addEventListener("submit", (event) => {
    event.preventDefault();
    void controller.start(readForm(doc));
  });

  (doc.getElementById("legend-type") as HTMLSelectElement).addEventListener(
    "change",
    (event) => {
      const binary = (event.target as HTMLSelectElement).value === "binary";
      doc.getElementById("binary-fields")!.classList.toggle("hidden", !binary);
    },
  );

  const params = new URL(doc.defaultView!.location.href).searchParams;
  const sessionId = params.get("session");
  if (sessionId) {
    const base = params.get("base") ?? input(doc, "base-url").value.trim();
    void controller.restore(base, sessionId);
  }
  return controller;
}

if (typeof document !== "undefined" && document.getElementById("start-form")) {
  boot(document);
}
