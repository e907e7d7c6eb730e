// Page assembly: ?project=<id> (&base=<service origin>&token=...) selects
// the session. Queue on the left, dashboard and controls on the right.

import { ApiClient } from "./api";
import { ControlPanel } from "./controlPanel";
import { Dashboard } from "./dashboard";
import { KeyboardController } from "./keyboard";
import { OfflineQueue } from "./offlineQueue";
import { QueueView } from "./queueView";
import { SessionStore } from "./session";

export interface AppHandles {
  store: SessionStore;
  queue: QueueView;
  dashboard: Dashboard;
  controls: ControlPanel;
  keyboard: KeyboardController;
}

export async function mountApp(
  root: HTMLElement,
  options: {
    baseUrl: string;
    projectId: string;
    token?: string | null;
    pollMs?: number;
    screener?: string;
  },
): Promise<AppHandles> {
  root.innerHTML = `
    <main class="layout">
      <section id="queue"></section>
      <aside>
        <section id="controls"></section>
        <section id="dashboard"></section>
      </aside>
    </main>`;
  const api = new ApiClient(options.baseUrl, options.token ?? null);
  const store = new SessionStore(api, options.projectId, options.pollMs ?? 5000);
  const view = await api.project(options.projectId);

  const offlineQueue = new OfflineQueue();
  const queue = new QueueView(
    root.querySelector<HTMLElement>("#queue")!,
    api,
    options.projectId,
    offlineQueue,
    view.exclusion_criteria,
    {
      onLabeled: () => void store.refresh(),
      onQueueEmpty: () => void store.refresh(),
    },
    options.screener ?? "reviewer",
  );
  const dashboard = new Dashboard(root.querySelector<HTMLElement>("#dashboard")!);
  const controls = new ControlPanel(
    root.querySelector<HTMLElement>("#controls")!,
    api,
    options.projectId,
    {
      onJobDone: () => {
        void store.refresh();
        void queue.load();
      },
    },
  );
  store.subscribe((snapshot) => {
    dashboard.render(snapshot);
    controls.update(snapshot);
  });

  const keyboard = new KeyboardController({
    include: () => queue.include(),
    exclude: () => queue.exclude(),
    undo: () => queue.undo(),
    pickCriterion: (i) => queue.pickCriterion(i),
    cancelPicker: () => queue.cancelPicker(),
  });
  // the picker owns digit keys while open
  const renderPicker = queue.render.bind(queue);
  queue.render = () => {
    renderPicker();
    keyboard.pickerOpen = queue.pickerCriteria !== null;
  };
  keyboard.attach();

  window.addEventListener("online", () => void queue.reconnect());

  await queue.load();
  store.start();
  return { store, queue, dashboard, controls, keyboard };
}

// Browser entry point; tests import mountApp directly instead.
if (typeof document !== "undefined" && document.getElementById("app")) {
  const params = new URLSearchParams(window.location.search);
  const projectId = params.get("project");
  const base = params.get("base") ?? window.location.origin;
  if (projectId) {
    void mountApp(document.getElementById("app")!, {
      baseUrl: base,
      projectId,
      token: params.get("token"),
    });
  } else {
    document.getElementById("app")!.innerHTML =
      "<p>append ?project=&lt;id&gt; to open a screening session</p>";
  }
}
