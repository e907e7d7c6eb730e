// Keyboard shortcuts for the screening queue. Bindings are inert while the
// exclusion-criterion picker is open (digits and Escape take over) or when
// focus sits in a text input.

export interface ShortcutHandlers {
  include(): void;
  exclude(): void;
  undo(): void;
  pickCriterion(index: number): void;
  cancelPicker(): void;
}

export class KeyboardController {
  pickerOpen = false;

  constructor(
    private handlers: ShortcutHandlers,
    private target: Pick<Document, "addEventListener" | "removeEventListener"> = document,
  ) {}

  private onKeydown = (event: Event): void => {
    const e = event as KeyboardEvent;
    const element = e.target as HTMLElement | null;
    if (element && ("value" in element || element.isContentEditable)) return;
    if (this.pickerOpen) {
      if (e.key >= "1" && e.key <= "9") {
        this.handlers.pickCriterion(Number(e.key) - 1);
        e.preventDefault();
      } else if (e.key === "Escape") {
        this.handlers.cancelPicker();
        e.preventDefault();
      }
      return;
    }
    switch (e.key.toLowerCase()) {
      case "i":
        this.handlers.include();
        e.preventDefault();
        break;
      case "e":
        this.handlers.exclude();
        e.preventDefault();
        break;
      case "u":
        this.handlers.undo();
        e.preventDefault();
        break;
    }
  };

  attach(): void {
    this.target.addEventListener("keydown", this.onKeydown);
  }

  detach(): void {
    this.target.removeEventListener("keydown", this.onKeydown);
  }
}
